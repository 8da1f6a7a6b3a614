"""CSV loading and per-step aggregation.

The input contract is the configrl harness log schema: one row per
(run, step) with the header below. Aggregation computes, for each
requested algorithm and each step, the mean and population std of the
metric across that algorithm's runs. Smoothing is a trailing rolling
mean (window shrinks at the series head so the x-extent is preserved).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HARNESS_COLUMNS = (
    "run",
    "step",
    "algo",
    "config_id",
    "T",
    "C",
    "r_time",
    "r_cost",
    "scalar",
    "winner_policy",
    "eps",
)

METRICS = ("T", "C")


class SeriesError(ValueError):
    """Requested series are absent or the input files are malformed."""


@dataclass
class FigureSpec:
    metric: str
    algos: list[str]
    out: Path
    smoothing: int = 5

    def __post_init__(self):
        self.out = Path(self.out)
        if self.metric not in METRICS:
            raise SeriesError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.smoothing < 1:
            raise SeriesError(f"smoothing window must be >= 1, got {self.smoothing}")
        if not self.algos:
            raise SeriesError("at least one algorithm series is required")


@dataclass
class AggregatedSeries:
    """One algorithm's per-step statistics across runs."""

    algo: str
    mean: np.ndarray
    std: np.ndarray
    smoothed_mean: np.ndarray
    smoothed_std: np.ndarray
    n_runs: int


def load_runs(csv_dir: str | Path, metric: str) -> dict[str, np.ndarray]:
    """Per algorithm, a (runs, steps) matrix of the metric.

    Reads every ``*.csv`` in the directory except summary files.
    """
    csv_dir = Path(csv_dir)
    if metric not in METRICS:
        raise SeriesError(f"metric must be one of {METRICS}, got {metric!r}")
    paths = sorted(p for p in csv_dir.glob("*.csv") if p.name != "summary.csv")
    if not paths:
        raise SeriesError(f"no CSV files found in {csv_dir}")

    series: dict[str, dict[tuple[str, int], list[tuple[int, float]]]] = {}
    for path in paths:
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = tuple(next(reader, ()))
            if header != HARNESS_COLUMNS:
                raise SeriesError(
                    f"{path}: header does not match the harness schema {list(HARNESS_COLUMNS)}"
                )
            col = {name: i for i, name in enumerate(header)}
            for raw in reader:
                algo = raw[col["algo"]]
                key = (str(path), int(raw[col["run"]]))
                series.setdefault(algo, {}).setdefault(key, []).append(
                    (int(raw[col["step"]]), float(raw[col[metric]]))
                )

    out: dict[str, np.ndarray] = {}
    for algo, runs in series.items():
        rows = []
        for _, steps in sorted(runs.items()):
            steps.sort()
            rows.append([v for _, v in steps])
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise SeriesError(f"algo {algo!r}: runs have unequal lengths {sorted(lengths)}")
        out[algo] = np.array(rows)
    return out


def rolling_mean(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing rolling mean; partial windows at the head keep the length."""
    if window <= 1:
        return values.astype(float).copy()
    out = np.empty(len(values))
    csum = np.cumsum(np.insert(values.astype(float), 0, 0.0))
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def aggregate(csv_dir: str | Path, spec: FigureSpec) -> list[AggregatedSeries]:
    """Aggregate every requested algorithm; missing ones are an error."""
    runs = load_runs(csv_dir, spec.metric)
    missing = [a for a in spec.algos if a not in runs]
    if missing:
        raise SeriesError(
            f"series not found: {missing}; available: {sorted(runs)}"
        )
    out = []
    for algo in spec.algos:
        matrix = runs[algo]
        mean = matrix.mean(axis=0)
        std = matrix.std(axis=0)
        out.append(
            AggregatedSeries(
                algo=algo,
                mean=mean,
                std=std,
                smoothed_mean=rolling_mean(mean, spec.smoothing),
                smoothed_std=rolling_mean(std, spec.smoothing),
                n_runs=matrix.shape[0],
            )
        )
    return out


def write_sidecar(path: Path, spec: FigureSpec, series: list[AggregatedSeries]) -> None:
    """Auditable per-step aggregates backing one figure."""
    header = ["step"]
    for s in series:
        header += [f"{s.algo}_mean", f"{s.algo}_std", f"{s.algo}_smoothed"]
    steps = len(series[0].mean)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i in range(steps):
            row = [i]
            for s in series:
                row += [repr(float(s.mean[i])), repr(float(s.std[i])), repr(float(s.smoothed_mean[i]))]
            writer.writerow(row)


def sidecar_path(out: Path) -> Path:
    return out.with_name(out.stem + ".series.csv")
