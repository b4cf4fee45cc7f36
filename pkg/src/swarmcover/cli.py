"""Command-line entry point: single runs, full experiments, config validation."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .engine import run
from .harness import (
    emit_tables,
    experiment_config_from_file,
    ExperimentConfig,
    load_config_file,
    run_config_from_file,
    run_experiment,
)
from .mobility import MODELS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmcover",
        description="Drone-swarm area-coverage simulator with five mobility models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one seeded run and print its metrics row")
    p_run.add_argument("--model", required=True, choices=sorted(MODELS))
    p_run.add_argument("--uavs", required=True, type=int, help="number of mobile UAVs")
    p_run.add_argument("--seed", required=True, type=int)
    p_run.add_argument("--trace", default=None, help="write a per-second trace CSV here")
    p_run.add_argument("--config", default=None, help="JSON config with parameter overrides")
    p_run.set_defaults(func=cmd_run)

    p_exp = sub.add_parser("experiment", help="run the full sweep and emit figure tables")
    p_exp.add_argument("--config", default=None, help="JSON experiment config")
    p_exp.add_argument("--out", default=None, help="output directory (default: results)")
    p_exp.add_argument("--jobs", type=int, default=1, help="concurrent runs (default 1)")
    p_exp.set_defaults(func=cmd_experiment)

    p_val = sub.add_parser("validate-config", help="check a config file's invariants")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=cmd_validate)

    return parser


def cmd_run(args: argparse.Namespace) -> int:
    cfg = run_config_from_file(args.config, args.model, args.uavs, args.seed)
    record = run(cfg, trace_path=args.trace)
    row = [args.model, str(args.uavs), str(args.seed), *record.to_csv_values()]
    print(",".join(row))
    print(
        f"{args.model} n={args.uavs} seed={args.seed}: "
        f"t80={record.time_to_80:.0f}s t95={record.time_to_95:.0f}s "
        f"fairness={record.fairness_cv:.3f} connected={record.connected_pct:.1%} "
        f"messages={record.message_count} size={record.total_message_size}"
        + (" [censored]" if record.censored else ""),
        file=sys.stderr,
    )
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.config is not None:
        data = load_config_file(args.config)
        cfg = experiment_config_from_file(args.config)
        out_dir = args.out or data.get("out_dir") or "results"
    else:
        cfg = ExperimentConfig()
        out_dir = args.out or "results"
    table = run_experiment(cfg, jobs=max(1, args.jobs))
    written = emit_tables(table, out_dir)
    print(f"wrote {len(written)} files to {out_dir}", file=sys.stderr)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    experiment_config_from_file(args.config)
    print("config ok", file=sys.stderr)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # runtime failures exit 1; argparse handles usage (2)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
