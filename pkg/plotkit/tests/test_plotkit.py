"""Tests for figure rendering over the shipped golden CSVs."""

import csv
import statistics
from pathlib import Path

import numpy as np
import pytest

from plotkit.aggregate import (
    FigureSpec,
    SeriesError,
    aggregate,
    load_runs,
    rolling_mean,
    sidecar_path,
)
from plotkit.render import render

GOLDEN = Path(__file__).resolve().parent.parent / "golden"

FIGURES = [
    ("T", ["egreedy", "dqn", "dwn"]),
    ("C", ["egreedy", "dqn", "dwn"]),
    ("T", ["dwn", "dwn-policy-time", "dwn-policy-cost"]),
    ("C", ["dwn", "dwn-policy-time", "dwn-policy-cost"]),
]


def read_sidecar(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows)


class TestGoldenFigures:
    @pytest.mark.parametrize("metric,algos", FIGURES)
    def test_figure_analogue_renders(self, tmp_path, metric, algos):
        out = tmp_path / f"fig_{metric}_{len(algos)}.png"
        spec = FigureSpec(metric=metric, algos=algos, out=out, smoothing=5)
        result = render(GOLDEN, spec)
        assert result.exists() and result.stat().st_size > 0
        header, rows = read_sidecar(sidecar_path(out))
        # one series triple per algo, full x-extent
        assert len(header) == 1 + 3 * len(algos)
        assert rows.shape[0] == 300
        assert rows[0, 0] == 0 and rows[-1, 0] == 299

    def test_sidecar_matches_per_step_statistics_oracle(self, tmp_path):
        out = tmp_path / "fig.png"
        spec = FigureSpec(metric="T", algos=["dqn"], out=out, smoothing=1)
        render(GOLDEN, spec)
        _, rows = read_sidecar(sidecar_path(out))

        runs = load_runs(GOLDEN, "T")["dqn"]
        assert runs.shape == (8, 300)
        for step in range(0, 300, 37):
            column = list(runs[:, step])
            assert abs(rows[step, 1] - statistics.mean(column)) < 1e-9
            assert abs(rows[step, 2] - statistics.pstdev(column)) < 1e-9

    def test_sidecar_matches_harness_summarize_math(self, tmp_path):
        # The harness summary over a one-step window is exactly the
        # per-step pooled mean/std of the final step.
        harness = pytest.importorskip("configrl.harness")
        out = tmp_path / "fig.png"
        render(GOLDEN, FigureSpec(metric="T", algos=["egreedy"], out=out, smoothing=1))
        _, rows = read_sidecar(sidecar_path(out))
        summary = {
            r.algo: r
            for r in harness.summarize(
                [GOLDEN / f"egreedy-run{i}.csv" for i in range(8)], window=1
            )
        }["egreedy"]
        assert abs(rows[-1, 1] - summary.mean_T) < 1e-9
        assert abs(rows[-1, 2] - summary.std_T) < 1e-9


class TestAggregation:
    def test_unknown_algo_lists_available(self):
        spec = FigureSpec(metric="T", algos=["nope"], out="x.png")
        with pytest.raises(SeriesError, match="available"):
            aggregate(GOLDEN, spec)

    def test_constant_series_zero_band(self, tmp_path):
        # A constant metric yields a zero-height band.
        csv_dir = tmp_path / "logs"
        csv_dir.mkdir()
        header = "run,step,algo,config_id,T,C,r_time,r_cost,scalar,winner_policy,eps"
        for run in range(2):
            lines = [header] + [
                f"{run},{s},flat,0,0.25,0.1,0.25,0.1,-0.35,,0.1" for s in range(50)
            ]
            (csv_dir / f"flat-run{run}.csv").write_text("\n".join(lines) + "\n")
        series = aggregate(csv_dir, FigureSpec(metric="T", algos=["flat"], out="f.png"))
        assert np.allclose(series[0].std, 0.0)
        assert np.allclose(series[0].mean, 0.25)
        out = tmp_path / "flat.png"
        render(csv_dir, FigureSpec(metric="T", algos=["flat"], out=out))
        assert out.exists()

    def test_rolling_mean_window_one_is_identity(self):
        x = np.array([1.0, 2.0, 4.0])
        assert np.array_equal(rolling_mean(x, 1), x)

    def test_rolling_mean_trailing_partial_head(self):
        x = np.array([1.0, 2.0, 4.0, 8.0])
        got = rolling_mean(x, 2)
        assert np.allclose(got, [1.0, 1.5, 3.0, 6.0])

    def test_bad_metric_rejected(self):
        with pytest.raises(SeriesError):
            FigureSpec(metric="X", algos=["a"], out="x.png")

    def test_bad_smoothing_rejected(self):
        with pytest.raises(SeriesError):
            FigureSpec(metric="T", algos=["a"], out="x.png", smoothing=0)

    def test_bad_header_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(SeriesError, match="schema"):
            load_runs(tmp_path, "T")


class TestCli:
    def test_plot_command(self, tmp_path, capsys):
        from plotkit.cli import main

        out = tmp_path / "cli_fig.png"
        code = main(
            ["plot", "--in", str(GOLDEN), "--metric", "C",
             "--algos", "egreedy,dwn", "--smooth", "3", "--out", str(out)]
        )
        assert code == 0
        assert out.exists()
        assert sidecar_path(out).exists()

    def test_plot_unknown_series_fails(self, tmp_path, capsys):
        from plotkit.cli import main

        code = main(
            ["plot", "--in", str(GOLDEN), "--metric", "C",
             "--algos", "missing", "--out", str(tmp_path / "x.png")]
        )
        assert code == 1
        assert "available" in capsys.readouterr().err
