"""Per-UAV visit maps on the coarse grid with linear evaporation.

A map stores the last visit time per pheromone cell (-inf when never
visited). Concentration decays linearly from 1 at the visit instant to 0
after ``tau`` seconds. Maps merge by elementwise max, which makes neighbor
synchronisation idempotent, commutative and associative.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .geometry import CellIndex, FieldSpec, GridKind, Pose, disc_window

DEFAULT_TAU = 300.0

# Directional "smell" query geometry shared by the three-action models:
# candidate headings are the current one rotated by +-45 degrees, each
# scored over a 30-degree half-angle cone reaching 50 m ahead.
TURN_QUANTUM = math.pi / 4.0
CONE_HALF_ANGLE = math.pi / 6.0
CONE_REACH = 50.0

ACTION_TURNS = {"left": TURN_QUANTUM, "straight": 0.0, "right": -TURN_QUANTUM}


class PheromoneMap:
    """Last-visit timestamps on the pheromone grid of one UAV."""

    def __init__(self, field: FieldSpec, tau: float = DEFAULT_TAU):
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.field = field
        self.tau = float(tau)
        self.last_visit = np.full(
            (field.rows(GridKind.PHEROMONE), field.cols(GridKind.PHEROMONE)),
            -math.inf,
            dtype=np.float64,
        )

    def copy(self) -> "PheromoneMap":
        out = PheromoneMap.__new__(PheromoneMap)
        out.field = self.field
        out.tau = self.tau
        out.last_visit = self.last_visit.copy()
        return out

    def deposit(self, cells: Iterable[CellIndex], t: float) -> None:
        """Stamp ``t`` into the given cells, keeping newer visits (max semantics)."""
        for cell in cells:
            if cell.kind is not GridKind.PHEROMONE:
                raise ValueError("deposit expects pheromone-grid cells")
            if self.last_visit[cell.row, cell.col] < t:
                self.last_visit[cell.row, cell.col] = t

    def deposit_disc(self, center: tuple[float, float], radius: float, t: float) -> None:
        """Stamp the sensor footprint around ``center``; hot-path twin of deposit."""
        win, mask = disc_window(center[0], center[1], radius, self.field, GridKind.PHEROMONE)
        sub = self.last_visit[win]
        np.maximum(sub, np.where(mask, t, -math.inf), out=sub)

    def concentration(self, cell: CellIndex, now: float) -> float:
        """Linear evaporation: 1 when just visited, 0 after tau seconds or never."""
        lv = self.last_visit[cell.row, cell.col]
        if lv == -math.inf:
            return 0.0
        return max(0.0, 1.0 - (now - lv) / self.tau)

    def concentration_at(self, x: float, y: float, now: float) -> float:
        """Concentration of the cell containing the point (clamped to the grid)."""
        cell = self.field.cell_size(GridKind.PHEROMONE)
        col = min(int(x // cell), self.last_visit.shape[1] - 1)
        row = min(int(y // cell), self.last_visit.shape[0] - 1)
        lv = self.last_visit[max(0, row), max(0, col)]
        if lv == -math.inf:
            return 0.0
        return max(0.0, 1.0 - (now - lv) / self.tau)


def merge(mine: PheromoneMap, theirs: PheromoneMap) -> PheromoneMap:
    """Elementwise-max combination of two maps on the same grid."""
    if mine.last_visit.shape != theirs.last_visit.shape or mine.tau != theirs.tau:
        raise ValueError("cannot merge maps with different grids or tau")
    out = mine.copy()
    np.maximum(out.last_visit, theirs.last_visit, out=out.last_visit)
    return out


def merge_into(mine: PheromoneMap, theirs: PheromoneMap) -> None:
    """In-place variant of :func:`merge` used on broadcast delivery."""
    if mine.last_visit.shape != theirs.last_visit.shape or mine.tau != theirs.tau:
        raise ValueError("cannot merge maps with different grids or tau")
    np.maximum(mine.last_visit, theirs.last_visit, out=mine.last_visit)


def sector_smell(pmap: PheromoneMap, p: Pose, action: str, now: float) -> float:
    """Total concentration in the cone ahead of the candidate heading.

    The cone has half-angle 30 degrees around the current heading rotated by
    +45/0/-45 degrees for left/straight/right, reaching 50 m. Out-of-field
    cells count as concentration 1 so walls repel like freshly visited area.
    """
    if action not in ACTION_TURNS:
        raise ValueError(f"unknown action {action!r}")
    field = pmap.field
    cand = p.heading + ACTION_TURNS[action]
    cell = field.cell_size(GridKind.PHEROMONE)
    cols = field.cols(GridKind.PHEROMONE)
    rows = field.rows(GridKind.PHEROMONE)
    reach = int(CONE_REACH / cell) + 1
    c0 = int(p.x // cell)
    r0 = int(p.y // cell)
    cidx = np.arange(c0 - reach, c0 + reach + 1)
    ridx = np.arange(r0 - reach, r0 + reach + 1)
    dx = (cidx + 0.5) * cell - p.x
    dy = (ridx + 0.5) * cell - p.y
    d2 = dx[None, :] ** 2 + dy[:, None] ** 2
    # |angle - cand| <= half-angle, expressed as a dot-product test to stay
    # vectorised without trigonometry per cell
    dot = dx[None, :] * math.cos(cand) + dy[:, None] * math.sin(cand)
    cos2 = math.cos(CONE_HALF_ANGLE) ** 2
    in_cone = (d2 > 0.0) & (d2 <= CONE_REACH * CONE_REACH) & (dot >= 0.0) & (dot * dot >= cos2 * d2)
    in_field = (
        (cidx[None, :] >= 0) & (cidx[None, :] < cols) & (ridx[:, None] >= 0) & (ridx[:, None] < rows)
    )
    inside = in_cone & in_field
    smell = float(np.count_nonzero(in_cone & ~in_field))
    if inside.any():
        lv = pmap.last_visit[
            np.clip(ridx, 0, rows - 1)[:, None], np.clip(cidx, 0, cols - 1)[None, :]
        ]
        conc = np.clip(1.0 - (now - lv) / pmap.tau, 0.0, 1.0)
        smell += float(conc[inside].sum())
    return smell


def path_smell(pmap: PheromoneMap, start: tuple[float, float], heading: float,
               length: float, now: float, sample_step: float = 5.0) -> float:
    """Total concentration along a straight path, sampled every ``sample_step`` m."""
    total = 0.0
    cos_h, sin_h = math.cos(heading), math.sin(heading)
    n = int(length / sample_step)
    for k in range(1, n + 1):
        s = k * sample_step
        total += pmap.concentration_at(start[0] + s * cos_h, start[1] + s * sin_h, now)
    return total
