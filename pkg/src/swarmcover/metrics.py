"""Per-tick sampling and end-of-run computation of the seven run metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import FieldSpec, GridKind, disc_window
from .radio import MessageLedger, RadioGraph, connected_components


class ScanGrid:
    """Per-cell cumulative scan seconds on the measurement grid.

    Overlapping scans within the same second count once per cell, enforced by
    a reusable per-tick union mask.
    """

    def __init__(self, field: FieldSpec, sensor_range: float):
        if sensor_range <= 0:
            raise ValueError("sensor_range must be positive")
        self.field = field
        self.sensor_range = float(sensor_range)
        shape = (field.rows(GridKind.MEASUREMENT), field.cols(GridKind.MEASUREMENT))
        self.scanned_seconds = np.zeros(shape, dtype=np.uint32)
        self._tick_mask = np.zeros(shape, dtype=bool)
        self.covered_cell_count = 0
        self.total_cells = shape[0] * shape[1]

    def mark_scans(self, positions) -> int:
        """Add one second of scan to every cell under any sensor disc.

        Returns the number of never-before-covered cells gained this tick.
        """
        windows = []
        for x, y in positions:
            win, mask = disc_window(float(x), float(y), self.sensor_range, self.field,
                                    GridKind.MEASUREMENT)
            self._tick_mask[win] |= mask
            windows.append(win)
        fresh = 0
        for win in windows:
            sub = self._tick_mask[win]
            if not sub.any():
                continue  # fully consumed by an overlapping earlier window
            counts = self.scanned_seconds[win]
            fresh += int(np.count_nonzero(sub & (counts == 0)))
            counts += sub
            sub[:] = False
        self.covered_cell_count += fresh
        return fresh


@dataclass
class RunSamples:
    """Per-second connectivity observations accumulated over a run."""

    component_counts: list[int] = field(default_factory=list)
    fully_connected_seconds: int = 0
    root_reach_seconds: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @classmethod
    def for_uavs(cls, n_uavs: int) -> "RunSamples":
        return cls(root_reach_seconds=np.zeros(n_uavs, dtype=np.int64))


def tick_sample(
    grid: ScanGrid, samples: RunSamples, uav_positions, graph: RadioGraph, root_id: int
) -> None:
    """One per-second observation: scan marks plus connectivity snapshot."""
    grid.mark_scans(uav_positions)
    count, labels = connected_components(graph)
    samples.component_counts.append(count)
    if count == 1:
        samples.fully_connected_seconds += 1
    root_label = labels[root_id]
    for i in range(len(uav_positions)):
        if labels[i] == root_label:
            samples.root_reach_seconds[i] += 1


def coverage_fraction(grid: ScanGrid) -> float:
    return grid.covered_cell_count / grid.total_cells


def fairness_cv(grid: ScanGrid) -> float:
    """Population coefficient of variation of scan seconds over all cells."""
    counts = grid.scanned_seconds
    mean = float(counts.mean())
    if mean == 0.0:
        raise ValueError("fairness is undefined on an all-zero grid")
    return float(counts.std()) / mean


@dataclass(frozen=True)
class MetricsRecord:
    """One run's outcome; time fields are NaN when the target was not reached."""

    time_to_80: float
    time_to_95: float
    fairness_cv: float
    connected_pct: float
    avg_components: float
    root_conn_pct: float
    message_count: int
    total_message_size: int
    censored: bool
    stop_time: int

    def to_csv_values(self) -> list[str]:
        return [
            str(self.time_to_80),
            str(self.time_to_95),
            str(self.fairness_cv),
            str(self.connected_pct),
            str(self.avg_components),
            str(self.root_conn_pct),
            str(self.message_count),
            str(self.total_message_size),
            str(int(self.censored)),
            str(self.stop_time),
        ]


RECORD_COLUMNS = (
    "time_to_80",
    "time_to_95",
    "fairness_cv",
    "connected_pct",
    "avg_components",
    "root_conn_pct",
    "message_count",
    "total_message_size",
    "censored",
    "stop_time",
)


def finalize(
    grid: ScanGrid,
    samples: RunSamples,
    ledger: MessageLedger,
    stop_time: int,
    time_to_80: int | None,
    time_to_95: int | None,
) -> MetricsRecord:
    """Fold the per-second samples and the ledger into the run record."""
    if stop_time <= 0 or not samples.component_counts:
        raise ValueError("finalize requires at least one simulated second")
    return MetricsRecord(
        time_to_80=float(time_to_80) if time_to_80 is not None else math.nan,
        time_to_95=float(time_to_95) if time_to_95 is not None else math.nan,
        fairness_cv=fairness_cv(grid),
        connected_pct=samples.fully_connected_seconds / stop_time,
        avg_components=sum(samples.component_counts) / len(samples.component_counts),
        root_conn_pct=float(np.mean(samples.root_reach_seconds / stop_time)),
        message_count=ledger.message_count,
        total_message_size=ledger.total_size,
        censored=time_to_95 is None,
        stop_time=stop_time,
    )
