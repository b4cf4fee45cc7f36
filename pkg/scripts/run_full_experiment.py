#!/usr/bin/env python3
"""Run the full comparative evaluation and write the figure tables.

Defaults reproduce the complete protocol: 5 models x 9 swarm sizes x 30
seeded runs on the 2000 m x 1000 m field. That is days of CPU time at full
scale; use --runs/--counts/--models to carve out a slice, or --jobs to
parallelise across cores.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from swarmcover.harness import (
    DEFAULT_MODELS,
    DEFAULT_UAV_COUNTS,
    ExperimentConfig,
    emit_tables,
    run_experiment,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--runs", type=int, default=30, help="runs per (model, count) cell")
    parser.add_argument("--seed", type=int, default=1, help="base seed")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent runs")
    parser.add_argument("--models", nargs="+", default=list(DEFAULT_MODELS))
    parser.add_argument("--counts", nargs="+", type=int, default=list(DEFAULT_UAV_COUNTS))
    parser.add_argument("--time-cap", type=int, default=50_000)
    args = parser.parse_args()

    cfg = ExperimentConfig(
        models=tuple(args.models),
        uav_counts=tuple(args.counts),
        runs_per_cell=args.runs,
        base_seed=args.seed,
        time_cap=args.time_cap,
    )
    n_runs = len(cfg.models) * len(cfg.uav_counts) * cfg.runs_per_cell
    print(f"running {n_runs} simulations with jobs={args.jobs} ...", flush=True)
    t0 = time.perf_counter()
    table = run_experiment(cfg, jobs=args.jobs)
    written = emit_tables(table, args.out)
    print(f"done in {time.perf_counter() - t0:.0f}s; wrote {len(written)} files to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
