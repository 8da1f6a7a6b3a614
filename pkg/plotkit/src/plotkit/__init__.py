"""Post-hoc figures for configrl experiment logs.

Reads the harness CSV schema (run, step, algo, config_id, T, C, r_time,
r_cost, scalar, winner_policy, eps), aggregates each algorithm's metric
per step across runs, and renders mean lines with shaded +/-1 std bands.
Every figure ships with a sidecar CSV of the aggregated series so the
plotted numbers are auditable.
"""

__version__ = "0.1.0"

from plotkit.aggregate import FigureSpec, SeriesError, aggregate, load_runs
from plotkit.render import render

__all__ = [
    "FigureSpec",
    "SeriesError",
    "aggregate",
    "load_runs",
    "render",
    "__version__",
]
