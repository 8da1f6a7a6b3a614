"""Command-line entry points.

Every ``run`` flag can also come from the environment using the
``CONFIGRL_`` prefix with the flag name upper-snake-cased, e.g.
``CONFIGRL_ALGO=dwn``, ``CONFIGRL_WINDOW_SECS=0.2``. Explicit flags win
over environment values.

Exit codes: 0 success, 1 at least one run failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from configrl.envs.httpenv import live_catalog, serve
from configrl.envs.sim import bundled_scenario_path, load_scenario
from configrl.harness import ALGOS, format_summary, run_experiment, summarize, write_summary


def _env(name: str, default, cast=str):
    raw = os.environ.get(f"CONFIGRL_{name}")
    if raw is None:
        return default
    return cast(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="configrl",
        description="Multi-objective RL experiments over a 42-configuration server catalog.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm for the seeded-runs protocol")
    run.add_argument("--algo", choices=ALGOS, default=_env("ALGO", None), required=_env("ALGO", None) is None)
    run.add_argument("--env", choices=("sim", "http"), default=_env("ENV", "sim"))
    run.add_argument("--scenario", default=_env("SCENARIO", str(bundled_scenario_path())))
    run.add_argument("--steps", type=int, default=_env("STEPS", 300, int))
    run.add_argument("--runs", type=int, default=_env("RUNS", 8, int))
    run.add_argument("--seed", type=int, default=_env("SEED", 1, int))
    run.add_argument("--out", default=_env("OUT", "results"))
    run.add_argument("--window-secs", type=float, default=_env("WINDOW_SECS", 3.0, float))
    run.add_argument("--port", type=int, default=_env("PORT", 0, int))
    replay = run.add_mutually_exclusive_group()
    replay.add_argument("--per", dest="replay_mode", action="store_const", const="per")
    replay.add_argument(
        "--uniform-replay", dest="replay_mode", action="store_const", const="uniform"
    )
    run.set_defaults(replay_mode=_env("REPLAY_MODE", "per"))
    agg = run.add_mutually_exclusive_group()
    agg.add_argument("--pooled", dest="pooled", action="store_true")
    agg.add_argument("--per-run", dest="pooled", action="store_false")
    run.set_defaults(pooled=_env("POOLED", "1") not in ("0", "false", "no"))
    run.add_argument(
        "--w-negate-bracket",
        action="store_true",
        default=_env("W_NEGATE_BRACKET", "0") not in ("0", "false", "no"),
        help="flip the sign of the bracketed term in the W-value update",
    )

    summ = sub.add_parser("summarize", help="recompute the summary from logged CSVs")
    summ.add_argument("--in", dest="in_dir", required=True)
    summ.add_argument("--per-run", dest="pooled", action="store_false", default=True)
    summ.add_argument("--window", type=int, default=100)

    srv = sub.add_parser("serve", help="run the live loopback server until interrupted")
    srv.add_argument("--scenario", default=str(bundled_scenario_path()))
    srv.add_argument("--port", type=int, default=8421)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "run":
        from configrl.dqn import Hyperparameters

        hp = Hyperparameters(
            replay_mode=args.replay_mode, w_negate_bracket=args.w_negate_bracket
        )
        rows, failed = run_experiment(
            algo=args.algo,
            env_kind=args.env,
            scenario=args.scenario,
            steps=args.steps,
            runs=args.runs,
            base_seed=args.seed,
            out_dir=args.out,
            hp=hp,
            window_secs=args.window_secs,
            port=args.port,
            pooled=args.pooled,
        )
        print(format_summary(rows))
        if failed:
            print(f"{failed} run(s) failed", file=sys.stderr)
            return 1
        return 0

    if args.command == "summarize":
        rows = summarize(args.in_dir, pooled=args.pooled, window=args.window)
        write_summary(rows, os.path.join(args.in_dir, "summary.csv"))
        print(format_summary(rows))
        return 0

    if args.command == "serve":
        scenario = load_scenario(args.scenario)
        server = serve(live_catalog(scenario), port=args.port)
        print(f"serving scenario {scenario.name!r} on 127.0.0.1:{server.port}")
        try:
            while True:
                time.sleep(1.0)
        except KeyboardInterrupt:
            server.shutdown()
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
