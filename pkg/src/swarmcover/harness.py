"""Model x UAV-count x seed sweeps with figure-ready table emission.

Each (model, count) cell runs seeds base_seed..base_seed+runs-1; the engine
folds model and count into its stream label, so adding models or counts
never perturbs existing cells. Censored runs are excluded from the two
coverage-time means but still contribute to connectivity and traffic means.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Optional

import numpy as np

from .engine import RunConfig, run
from .geometry import FieldSpec
from .metrics import RECORD_COLUMNS, MetricsRecord
from .mobility import MODELS

DEFAULT_MODELS = ("random", "dpr", "connectivity", "khopca", "conncov")
DEFAULT_UAV_COUNTS = (4, 6, 8, 10, 15, 20, 30, 40, 50)

METRIC_KEYS = (
    "time_to_80",
    "time_to_95",
    "fairness_cv",
    "connected_pct",
    "avg_components",
    "root_conn_pct",
    "message_count",
    "total_message_size",
)
TIME_KEYS = ("time_to_80", "time_to_95")

PANELS = (
    ("fig1a_time80", "time_to_80"),
    ("fig1b_time95", "time_to_95"),
    ("fig1c_fairness", "fairness_cv"),
    ("fig2a_connected_pct", "connected_pct"),
    ("fig2b_avg_components", "avg_components"),
    ("fig2c_root_conn", "root_conn_pct"),
    ("fig3a_msg_count", "message_count"),
    ("fig3b_msg_size", "total_message_size"),
)


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[str, ...] = DEFAULT_MODELS
    uav_counts: tuple[int, ...] = DEFAULT_UAV_COUNTS
    runs_per_cell: int = 30
    base_seed: int = 1
    field: FieldSpec = FieldSpec()
    radio_range: float = 400.0
    sensor_range: float = 20.0
    speed: float = 5.0
    decision_intervals: dict[str, int] = dataclass_field(default_factory=dict)
    time_cap: int = 50_000

    def __post_init__(self) -> None:
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be at least 1")
        if not self.uav_counts or any(n < 1 for n in self.uav_counts):
            raise ValueError("uav_counts must be non-empty with all counts >= 1")
        if not self.models:
            raise ValueError("models must be non-empty")
        for m in self.models:
            if m not in MODELS:
                raise ValueError(f"unknown model {m!r}; choose from {sorted(MODELS)}")
        for m, iv in self.decision_intervals.items():
            if m not in MODELS:
                raise ValueError(f"decision interval given for unknown model {m!r}")
            if iv < 1:
                raise ValueError("decision intervals must be at least 1 second")

    def run_config(self, model: str, n_uavs: int, seed: int) -> RunConfig:
        return RunConfig(
            model=model,
            n_uavs=n_uavs,
            seed=seed,
            field=self.field,
            radio_range=self.radio_range,
            sensor_range=self.sensor_range,
            speed=self.speed,
            decision_interval=self.decision_intervals.get(model),
            time_cap=self.time_cap,
        )


@dataclass(frozen=True)
class AggregateRow:
    model: str
    n_uavs: int
    means: dict[str, float]
    stds: dict[str, float]
    censored_count: int


@dataclass(frozen=True)
class ExperimentTable:
    cfg: ExperimentConfig
    rows: tuple[AggregateRow, ...]
    runs: tuple[tuple[str, int, int, MetricsRecord], ...]  # (model, n, seed, record)

    def row(self, model: str, n_uavs: int) -> AggregateRow:
        for r in self.rows:
            if r.model == model and r.n_uavs == n_uavs:
                return r
        raise KeyError(f"no cell for ({model}, {n_uavs})")


def _mean_std(values: list[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    if len(values) == 1:
        return float(values[0]), 0.0
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std(ddof=1))


def aggregate_cell(model: str, n_uavs: int, records: list[MetricsRecord]) -> AggregateRow:
    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    for key in METRIC_KEYS:
        values = [
            float(getattr(rec, key))
            for rec in records
            if not (key in TIME_KEYS and rec.censored)
        ]
        means[key], stds[key] = _mean_std(values)
    censored = sum(1 for rec in records if rec.censored)
    return AggregateRow(model, n_uavs, means, stds, censored)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentTable:
    """Run every (model, count, seed) cell and aggregate.

    Cells are independent; with jobs > 1 they execute in a process pool, and
    the aggregated output is identical to the sequential order.
    """
    run_cfgs: list[RunConfig] = []
    labels: list[tuple[str, int, int]] = []
    for model in cfg.models:
        for n in cfg.uav_counts:
            for k in range(cfg.runs_per_cell):
                seed = cfg.base_seed + k
                run_cfgs.append(cfg.run_config(model, n, seed))
                labels.append((model, n, seed))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run, run_cfgs, chunksize=1))
    else:
        records = [run(rc) for rc in run_cfgs]

    rows = []
    index = 0
    for model in cfg.models:
        for n in cfg.uav_counts:
            cell = records[index : index + cfg.runs_per_cell]
            index += cfg.runs_per_cell
            rows.append(aggregate_cell(model, n, cell))
    runs = tuple(
        (model, n, seed, rec) for (model, n, seed), rec in zip(labels, records)
    )
    return ExperimentTable(cfg=cfg, rows=tuple(rows), runs=runs)


def emit_tables(table: ExperimentTable, out_dir: str | Path) -> list[Path]:
    """Write the eight figure panels plus the raw per-run records file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = table.cfg
    written: list[Path] = []
    for panel_name, key in PANELS:
        path = out / f"{panel_name}.csv"
        lines = ["n_uavs," + ",".join(cfg.models)]
        for n in cfg.uav_counts:
            cells = [str(table.row(model, n).means[key]) for model in cfg.models]
            lines.append(f"{n}," + ",".join(cells))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    raw = out / "runs.csv"
    lines = ["model,n_uavs,seed," + ",".join(RECORD_COLUMNS)]
    for model, n, seed, rec in table.runs:
        lines.append(f"{model},{n},{seed}," + ",".join(rec.to_csv_values()))
    raw.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(raw)
    return written


# ---------------------------------------------------------------------------
# Structured-text configuration files (JSON, keys mirroring the parameter table)

_TOP_LEVEL_KEYS = {
    "area",
    "measure_cell_m",
    "pheromone_cell_m",
    "speed_mps",
    "radio_range_m",
    "sensor_range_m",
    "decision_intervals_s",
    "models",
    "uav_counts",
    "runs_per_cell",
    "base_seed",
    "time_cap_s",
    "out_dir",
}


def load_config_file(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return data


def experiment_config_from_dict(data: dict) -> ExperimentConfig:
    area = data.get("area", {})
    if not isinstance(area, dict) or set(area) - {"width_m", "height_m"}:
        raise ValueError("area must be an object with width_m/height_m")
    fld = FieldSpec(
        width=float(area.get("width_m", 2000.0)),
        height=float(area.get("height_m", 1000.0)),
        measure_cell=float(data.get("measure_cell_m", 1.0)),
        pheromone_cell=float(data.get("pheromone_cell_m", 5.0)),
    )
    intervals = {
        str(m): int(iv) for m, iv in dict(data.get("decision_intervals_s", {})).items()
    }
    return ExperimentConfig(
        models=tuple(data.get("models", DEFAULT_MODELS)),
        uav_counts=tuple(int(n) for n in data.get("uav_counts", DEFAULT_UAV_COUNTS)),
        runs_per_cell=int(data.get("runs_per_cell", 30)),
        base_seed=int(data.get("base_seed", 1)),
        field=fld,
        radio_range=float(data.get("radio_range_m", 400.0)),
        sensor_range=float(data.get("sensor_range_m", 20.0)),
        speed=float(data.get("speed_mps", 5.0)),
        decision_intervals=intervals,
        time_cap=int(data.get("time_cap_s", 50_000)),
    )


def experiment_config_from_file(path: str | Path) -> ExperimentConfig:
    return experiment_config_from_dict(load_config_file(path))


def run_config_from_file(
    path: Optional[str | Path], model: str, n_uavs: int, seed: int
) -> RunConfig:
    """Single-run config with optional file overrides for field and ranges."""
    if path is None:
        return RunConfig(model=model, n_uavs=n_uavs, seed=seed)
    exp = experiment_config_from_file(path)
    return exp.run_config(model, n_uavs, seed)
