"""Figure rendering: one mean line and one std band per algorithm."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from plotkit.aggregate import FigureSpec, aggregate, sidecar_path, write_sidecar

_METRIC_LABEL = {"T": "avg. response time", "C": "cost"}


def render(csv_dir: str | Path, spec: FigureSpec) -> Path:
    """Render one figure plus its sidecar CSV; returns the image path.

    x is the step index, y the smoothed per-step mean across runs, with
    a shaded band of +/-1 (smoothed) std. Reading the input CSVs is the
    only I/O besides the two output files.
    """
    series = aggregate(csv_dir, spec)
    spec.out.parent.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(7, 4))
    steps = range(len(series[0].mean))
    for s in series:
        (line,) = ax.plot(steps, s.smoothed_mean, label=s.algo, linewidth=1.6)
        ax.fill_between(
            steps,
            s.smoothed_mean - s.smoothed_std,
            s.smoothed_mean + s.smoothed_std,
            alpha=0.2,
            color=line.get_color(),
            linewidth=0,
        )
    ax.set_xlabel("step")
    ax.set_ylabel(_METRIC_LABEL[spec.metric])
    ax.set_xlim(0, max(len(series[0].mean) - 1, 1))
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out, dpi=120)
    plt.close(fig)

    write_sidecar(sidecar_path(spec.out), spec, series)
    return spec.out
