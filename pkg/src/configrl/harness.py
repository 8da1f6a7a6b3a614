"""Experiment orchestration: seeded runs, CSV logging, summary stats.

One experiment = one algorithm against one environment for ``runs``
independent runs of ``steps`` steps each, run r seeded with
``base_seed + r`` for both agent and environment. Every step appends
one CSV row; the per-run files plus a combined summary land in the
output directory.

CSV schema (header mandatory, one row per step)::

    run,step,algo,config_id,T,C,r_time,r_cost,scalar,winner_policy,eps

``winner_policy`` is empty for everything except the multi-objective
agent. Summaries report mean and population std (ddof=0) of T and C
over the final 100 steps of each run, pooled across runs by default;
per-run aggregation (mean of per-run means/stds) sits behind a flag.
A failed (shorter) run is one with fewer rows than the longest run of
its algorithm, so a summary recomputed from the CSVs alone matches the
one emitted during the experiment.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from configrl.baseline import BASELINE_EPS, EGreedyBaseline
from configrl.dqn import DqnAgent, Hyperparameters
from configrl.dwn import DwnAgent
from configrl.envs.httpenv import HttpEnv, LiveServer, live_catalog, serve
from configrl.envs.sim import Scenario, SimEnv, load_scenario
from configrl.errors import ContractError, EnvironmentFailure
from configrl.rewards import shape

ALGOS = ("egreedy", "dqn", "dwn", "dwn-policy-time", "dwn-policy-cost")

CSV_COLUMNS = (
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

SUMMARY_WINDOW = 100


@dataclass
class SummaryRow:
    algo: str
    runs: int
    failed_runs: int
    mean_T: float
    std_T: float
    mean_C: float
    std_C: float


def run_experiment(
    algo: str,
    env_kind: str = "sim",
    scenario: Scenario | str | Path | None = None,
    steps: int = 300,
    runs: int = 8,
    base_seed: int = 1,
    out_dir: str | Path = "results",
    hp: Hyperparameters | None = None,
    window_secs: float = 3.0,
    port: int = 0,
    pooled: bool = True,
) -> tuple[list[SummaryRow], int]:
    """Run the full protocol; returns (summary rows, failed run count).

    Writes ``<algo>-run<r>.csv`` per run and ``summary.csv`` covering
    every algorithm already logged in the output directory. A run that
    dies on an environment failure keeps its partial CSV and counts as
    failed.
    """
    if algo not in ALGOS:
        raise ContractError(f"unknown algo {algo!r}, expected one of {ALGOS}")
    if env_kind not in ("sim", "http"):
        raise ContractError(f"unknown env {env_kind!r}, expected sim or http")
    if isinstance(scenario, (str, Path)):
        scenario = load_scenario(scenario)
    if scenario is None:
        raise ContractError("a scenario is required")
    hp = hp or Hyperparameters()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    server: LiveServer | None = None
    if env_kind == "http":
        server = serve(live_catalog(scenario), port=port)

    failed = 0
    try:
        for r in range(runs):
            seed = base_seed + r
            if env_kind == "sim":
                env = SimEnv(scenario)
            else:
                env = HttpEnv(scenario, window_secs=window_secs, server=server)
            path = out_dir / f"{algo}-run{r}.csv"
            try:
                _run_once(algo, env, seed, steps, r, path, hp)
            except EnvironmentFailure:
                failed += 1
            finally:
                env.close()
    finally:
        if server is not None:
            server.shutdown()

    rows = summarize(out_dir, pooled=pooled)
    write_summary(rows, out_dir / "summary.csv")
    return rows, failed


def _run_once(
    algo: str,
    env,
    seed: int,
    steps: int,
    run_index: int,
    csv_path: Path,
    hp: Hyperparameters,
) -> None:
    agent = make_agent(algo, env.state_dim, env.n_actions, hp, seed)
    obs = env.reset(seed)
    with open(csv_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for step in range(steps):
            state = obs.state
            winner: int | None = None
            if algo == "dwn":
                winner, action, _ = agent.arbitrate(state)
            else:
                action = agent.select_action(state)

            obs = env.step(action)
            shaped = shape(obs.T, obs.C)

            if algo == "egreedy":
                agent.update(action, shaped.scalar)
                eps = agent.eps
            elif algo == "dwn":
                agent.observe(state, action, winner, obs.state, shaped.tuple)
                agent.train()
                eps = agent.policies[0].eps
            else:
                reward = {
                    "dqn": shaped.scalar,
                    "dwn-policy-time": shaped.tuple[0],
                    "dwn-policy-cost": shaped.tuple[1],
                }[algo]
                agent.observe(state, action, obs.state, [reward])
                agent.train_step()
                eps = agent.eps

            writer.writerow(
                (
                    run_index,
                    step,
                    algo,
                    action,
                    repr(float(obs.T)),
                    repr(float(obs.C)),
                    repr(float(shaped.r_time)),
                    repr(float(shaped.r_cost)),
                    repr(float(shaped.scalar)),
                    "" if winner is None else winner,
                    repr(float(eps)),
                )
            )


def make_agent(algo: str, state_dim: int, n_actions: int, hp: Hyperparameters, seed: int):
    if algo == "egreedy":
        return EGreedyBaseline(n_actions, seed, eps=BASELINE_EPS)
    if algo == "dwn":
        return DwnAgent(state_dim, n_actions, hp, seed, n_objectives=2)
    if algo in ("dqn", "dwn-policy-time", "dwn-policy-cost"):
        return DqnAgent(state_dim, n_actions, hp, seed)
    raise ContractError(f"unknown algo {algo!r}")


def read_rows(csv_path: str | Path) -> list[dict]:
    """Parse one harness CSV, validating the schema."""
    csv_path = Path(csv_path)
    with open(csv_path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ContractError(f"{csv_path}: empty file") from None
        if tuple(header) != CSV_COLUMNS:
            raise ContractError(
                f"{csv_path}: header {header} does not match schema {list(CSV_COLUMNS)}"
            )
        rows = []
        for line_no, raw in enumerate(reader, start=2):
            if len(raw) != len(CSV_COLUMNS):
                raise ContractError(
                    f"{csv_path}: row {line_no} has {len(raw)} fields, expected {len(CSV_COLUMNS)}"
                )
            row = dict(zip(CSV_COLUMNS, raw))
            for col in ("T", "C", "r_time", "r_cost", "scalar", "eps"):
                try:
                    row[col] = float(row[col])
                except ValueError:
                    raise ContractError(
                        f"{csv_path}: row {line_no} column {col}: {row[col]!r} is not a number"
                    ) from None
            for col in ("run", "step", "config_id"):
                row[col] = int(row[col])
            rows.append(row)
    return rows


def summarize(
    source: str | Path | list, pooled: bool = True, window: int = SUMMARY_WINDOW
) -> list[SummaryRow]:
    """Summarize per-run CSVs: T and C over each run's final window.

    ``source`` is a directory (every ``*.csv`` except summary.csv) or a
    list of CSV paths. Pooled mode concatenates the final windows of
    all runs before taking mean/std; per-run mode averages per-run
    means and stds instead.
    """
    if isinstance(source, (str, Path)) and Path(source).is_dir():
        paths = sorted(p for p in Path(source).glob("*.csv") if p.name != "summary.csv")
    else:
        paths = [Path(p) for p in source]

    by_algo_run: dict[tuple[str, str, int], list[dict]] = {}
    for path in paths:
        for row in read_rows(path):
            by_algo_run.setdefault((row["algo"], str(path), row["run"]), []).append(row)

    tails: dict[str, list[tuple[np.ndarray, np.ndarray, int]]] = {}
    for (algo, _, _), rows in sorted(by_algo_run.items()):
        rows.sort(key=lambda r: r["step"])
        tail = rows[-window:]
        ts = np.array([r["T"] for r in tail])
        cs = np.array([r["C"] for r in tail])
        tails.setdefault(algo, []).append((ts, cs, len(rows)))

    out = []
    for algo in sorted(tails):
        pairs = tails[algo]
        longest = max(n for _, _, n in pairs)
        failed = sum(1 for _, _, n in pairs if n < longest)
        if pooled:
            ts = np.concatenate([t for t, _, _ in pairs])
            cs = np.concatenate([c for _, c, _ in pairs])
            row = SummaryRow(
                algo=algo,
                runs=len(pairs),
                failed_runs=failed,
                mean_T=float(ts.mean()),
                std_T=float(ts.std()),
                mean_C=float(cs.mean()),
                std_C=float(cs.std()),
            )
        else:
            row = SummaryRow(
                algo=algo,
                runs=len(pairs),
                failed_runs=failed,
                mean_T=float(np.mean([t.mean() for t, _, _ in pairs])),
                std_T=float(np.mean([t.std() for t, _, _ in pairs])),
                mean_C=float(np.mean([c.mean() for _, c, _ in pairs])),
                std_C=float(np.mean([c.std() for _, c, _ in pairs])),
            )
        out.append(row)
    return out


def write_summary(rows: list[SummaryRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("algo", "runs", "failed_runs", "mean_T", "std_T", "mean_C", "std_C"))
        for row in rows:
            writer.writerow(
                (
                    row.algo,
                    row.runs,
                    row.failed_runs,
                    repr(row.mean_T),
                    repr(row.std_T),
                    repr(row.mean_C),
                    repr(row.std_C),
                )
            )


def format_summary(rows: list[SummaryRow]) -> str:
    """Human-readable table of the summary rows."""
    lines = [f"{'algo':<18} {'T':>19} {'C':>19}"]
    for row in rows:
        lines.append(
            f"{row.algo:<18} {row.mean_T:>8.4f} ± {row.std_T:<8.4f}"
            f" {row.mean_C:>8.4f} ± {row.std_C:<8.4f}"
        )
    return "\n".join(lines)
