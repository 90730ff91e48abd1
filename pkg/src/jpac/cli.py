"""Command-line entry point.

Subcommands: generate (emit instance JSON files), solve (one instance, one
algorithm), enumerate (brute-force benchmark), recover-qbar, and experiment
(the full Monte-Carlo driver).  Exit codes: 0 success, 1 configuration
error, 2 when any experiment row failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kernel
from .admission import run_lqmd, run_nlpd
from .harness import ExperimentConfig, run_experiment, rows_to_csv, summary_to_csv
from .network import NetworkInstance, normalize, select_alpha
from .oracle import enumerate_l0, estimate_qbar
from .scenario import ScenarioConfig, generate


def _load_instance(path: str) -> NetworkInstance:
    return NetworkInstance.from_json(Path(path).read_text())


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    import numpy as np

    master = np.random.SeedSequence(args.seed)
    for i, child in enumerate(master.spawn(args.count)):
        cfg = ScenarioConfig(
            K=args.K,
            distance_scale=args.distance_scale,
            seed=int(child.generate_state(1)[0]),
        )
        path = out / f"instance_K{args.K}_{i:04d}.json"
        path.write_text(generate(cfg).to_json() + "\n")
        print(path)
    return 0


def _cmd_solve(args) -> int:
    problem = normalize(_load_instance(args.instance))
    config = kernel.SolverConfig(epsilon=args.epsilon, trace_path=args.trace)
    if args.algo == "nlpd":
        result = run_nlpd(problem.with_alpha(select_alpha(problem)), config)
    else:
        result = run_lqmd(problem, q=args.q, n_starts=args.n, config=config, seed=args.seed)
    print(result.to_json())
    return 0


def _cmd_enumerate(args) -> int:
    problem = normalize(_load_instance(args.instance))
    problem = problem.with_alpha(select_alpha(problem))
    print(enumerate_l0(problem).to_json())
    return 0


def _cmd_recover_qbar(args) -> int:
    problem = normalize(_load_instance(args.instance))
    config = kernel.SolverConfig(epsilon=args.epsilon)
    qbar, status = estimate_qbar(problem, n_starts=args.n, config=config, seed=args.seed)
    print(json.dumps({"qbar": qbar, "status": status}))
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_json(Path(args.config).read_text())
    if args.seed is not None:
        config.seed = args.seed
    if args.runs is not None:
        config.runs = args.runs
    if args.out is not None:
        config.output_path = args.out
    out = Path(config.output_path)
    out.mkdir(parents=True, exist_ok=True)
    rows, summary = run_experiment(config)
    rows_path = out / f"{config.experiment}_rows.csv"
    summary_path = out / f"{config.experiment}_summary.csv"
    rows_path.write_text(rows_to_csv(rows))
    summary_path.write_text(summary_to_csv(summary))
    print(rows_path)
    print(summary_path)
    return 2 if any(r.error is not None for r in rows) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jpac", description="Joint power and admission control toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit random instance JSON files")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distance-scale", type=float, default=1.0)
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", help="run one deflation algorithm on one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--algo", choices=["nlpd", "lqmd"], required=True)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n", type=int, default=5, help="multistart count (lqmd)")
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", default=None, help="JSON-lines solver trace path")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("enumerate", help="brute-force benchmark for one instance")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("recover-qbar", help="estimate the recovery exponent")
    p.add_argument("--instance", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_recover_qbar)

    p = sub.add_parser("experiment", help="run a Monte-Carlo experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
