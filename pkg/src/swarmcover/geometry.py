"""Planar field geometry, cell grids and straight-line motion prediction.

Everything here is a pure function over value types; the simulation engine
and all five mobility models share these primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


class GridKind(str, Enum):
    MEASUREMENT = "measurement"
    PHEROMONE = "pheromone"


@dataclass(frozen=True)
class FieldSpec:
    """Rectangular mission field with its two discretisations.

    The measurement grid (default 1 m cells) is used for scan-time
    accounting; the coarser pheromone grid (default 5 m cells) backs the
    shared visit maps.
    """

    width: float = 2000.0
    height: float = 1000.0
    measure_cell: float = 1.0
    pheromone_cell: float = 5.0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("field dimensions must be positive")
        if self.measure_cell <= 0 or self.pheromone_cell <= 0:
            raise ValueError("cell sizes must be positive")
        ratio = self.pheromone_cell / self.measure_cell
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("pheromone_cell must be an integer multiple of measure_cell")
        for extent in (self.width, self.height):
            for cell in (self.measure_cell, self.pheromone_cell):
                if abs(extent / cell - round(extent / cell)) > 1e-9:
                    raise ValueError("field dimensions must be whole multiples of both cell sizes")

    def cell_size(self, kind: GridKind) -> float:
        return self.measure_cell if kind is GridKind.MEASUREMENT else self.pheromone_cell

    def cols(self, kind: GridKind) -> int:
        return round(self.width / self.cell_size(kind))

    def rows(self, kind: GridKind) -> int:
        return round(self.height / self.cell_size(kind))

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.width / 2.0, self.height / 2.0)


@dataclass
class Pose:
    """Planar kinematic state: position, heading in [0, 2pi), constant speed."""

    x: float
    y: float
    heading: float
    speed: float = 5.0


class CellIndex(NamedTuple):
    col: int
    row: int
    kind: GridKind


def wrap_heading(h: float) -> float:
    """Normalise an angle to [0, 2pi)."""
    h = math.fmod(h, TWO_PI)
    if h < 0.0:
        h += TWO_PI
    # adding 2pi to a tiny negative can round up to exactly 2pi
    return 0.0 if h >= TWO_PI else h


def signed_angle_diff(a: float, b: float) -> float:
    """Shortest signed rotation from ``b`` to ``a``, in (-pi, pi]."""
    d = math.fmod(a - b, TWO_PI)
    if d <= -math.pi:
        d += TWO_PI
    elif d > math.pi:
        d -= TWO_PI
    return d


def bearing(from_xy: tuple[float, float], to_xy: tuple[float, float]) -> float:
    return wrap_heading(math.atan2(to_xy[1] - from_xy[1], to_xy[0] - from_xy[0]))


def predict_position(p: Pose, dt: float) -> tuple[float, float]:
    """Straight-line constant-speed extrapolation, not clamped to the field."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    return (p.x + p.speed * dt * math.cos(p.heading), p.y + p.speed * dt * math.sin(p.heading))


def random_inward_heading(p: Pose, field: FieldSpec, rng: np.random.Generator) -> float:
    """Heading toward a uniformly random field point, safe to fly for 1 s.

    Targets whose heading would carry the UAV out of the field within one
    second (one ``speed``-length step) are redrawn, so the returned heading
    always points strictly into the field from a boundary pose.
    """
    for _ in range(1000):
        tx = rng.random() * field.width
        ty = rng.random() * field.height
        if tx == p.x and ty == p.y:
            continue
        h = bearing((p.x, p.y), (tx, ty))
        nx, ny = predict_position(Pose(p.x, p.y, h, p.speed), 1.0)
        if field.contains(nx, ny):
            return h
    # unreachable for any in-field pose with speed below the field extents
    return bearing((p.x, p.y), field.center)


def cells_in_disc(
    center: tuple[float, float], radius: float, field: FieldSpec, kind: GridKind
) -> set[CellIndex]:
    """In-field cells whose center point lies within ``radius`` of ``center``."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    (rows_sl, cols_sl), mask = disc_window(center[0], center[1], radius, field, kind)
    rr, cc = np.nonzero(mask)
    return {
        CellIndex(int(c) + cols_sl.start, int(r) + rows_sl.start, kind)
        for r, c in zip(rr, cc)
    }


@lru_cache(maxsize=64)
def _window_offsets(cell: float, radius: float) -> tuple[int, np.ndarray]:
    reach = int(radius / cell) + 1
    return reach, np.arange(-reach, reach + 1, dtype=np.float64) * cell


def disc_window(
    x: float, y: float, radius: float, field: FieldSpec, kind: GridKind
) -> tuple[tuple[slice, slice], np.ndarray]:
    """Clipped grid window around (x, y) plus the boolean in-disc mask.

    The mask marks cells whose center is within ``radius`` (inclusive); the
    window covers every such in-field cell. This is the vectorised twin of
    :func:`cells_in_disc` used on the per-tick hot path.
    """
    cell = field.cell_size(kind)
    cols = field.cols(kind)
    rows = field.rows(kind)
    reach, offsets = _window_offsets(cell, radius)
    c0 = int(x // cell)
    r0 = int(y // cell)
    cl, ch = max(0, c0 - reach), min(cols - 1, c0 + reach)
    rl, rh = max(0, r0 - reach), min(rows - 1, r0 + reach)
    if cl > ch or rl > rh:  # disc entirely outside the grid
        return (slice(0, 0), slice(0, 0)), np.zeros((0, 0), dtype=bool)
    cx = offsets[cl - c0 + reach : ch - c0 + reach + 1] + ((c0 + 0.5) * cell - x)
    cy = offsets[rl - r0 + reach : rh - r0 + reach + 1] + ((r0 + 0.5) * cell - y)
    mask = cx[None, :] ** 2 + cy[:, None] ** 2 <= radius * radius
    return (slice(rl, rh + 1), slice(cl, ch + 1)), mask
