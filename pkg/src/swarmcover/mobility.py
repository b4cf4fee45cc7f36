"""The five distributed mobility strategies behind one decide() interface.

Each strategy is a pure function of (local view, per-UAV rng): it returns the
new heading and the broadcasts to transmit, never touching shared state. The
engine owns scheduling (decision instants at t mod interval == 0) and
broadcast delivery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from .geometry import (
    FieldSpec,
    Pose,
    bearing,
    predict_position,
    signed_angle_diff,
    wrap_heading,
)
from .pheromone import ACTION_TURNS, PheromoneMap, path_smell, sector_smell
from .radio import RadioGraph, build_graph

BEACON_SIZE = 1
WEIGHT_SIZE = 1
MAP_SIZE = 10_000  # full visit-map payload, 100 x 100 size units

KHOPCA_MIN = 1

# Action scan order for cumulative random selection; frozen by golden-trace tests.
ACTION_ORDER = ("left", "straight", "right")
SMELL_EPSILON = 1e-6

# Connected-coverage candidates: the 8 absolute headings at multiples of 45
# degrees, with a 10% slack on the predicted parent distance.
CONNCOV_CANDIDATES = tuple(k * math.pi / 4.0 for k in range(8))
CONNCOV_RANGE_MARGIN = 0.9
PATH_SAMPLE_STEP = 5.0


@dataclass(frozen=True)
class Broadcast:
    kind: str  # beacon | map | weight
    size_units: int


@dataclass(frozen=True)
class Beacon:
    """Kinematic state a UAV announced: where it was and where it was going."""

    x: float
    y: float
    heading: float
    speed: float
    t: float


class NeighborInfo(NamedTuple):
    id: int
    position: tuple[float, float]  # from the current radio snapshot
    beacon: Optional[Beacon] = None  # last received announcement, may be stale


@dataclass(frozen=True)
class KhopcaState:
    """Clustering weight in [1, k]; k-weight nodes are cluster heads."""

    weight: int = KHOPCA_MIN
    k: int = 3
    threshold: int = 2
    follow_probability: float = 0.2


@dataclass
class Decision:
    new_heading: float
    broadcasts: list[Broadcast]
    parent_id: Optional[int] = None


@dataclass
class LocalView:
    """Everything a UAV may consult at a decision instant."""

    self_id: int
    pose: Pose
    now: float
    field: FieldSpec
    radio_range: float
    decision_interval: float
    neighbors: list[NeighborInfo]
    root_id: int
    graph: RadioGraph
    pheromone: Optional[PheromoneMap] = None
    khopca: Optional[KhopcaState] = None
    neighbor_weights: dict[int, int] = field(default_factory=dict)
    parent_id: Optional[int] = None


def predicted_neighbor_position(
    nb: NeighborInfo, now: float, horizon: float
) -> tuple[float, float]:
    """Extrapolate a neighbor from its last announcement; static if never heard."""
    if nb.beacon is None:
        return nb.position
    b = nb.beacon
    dt = (now - b.t) + horizon
    return (b.x + b.speed * dt * math.cos(b.heading), b.y + b.speed * dt * math.sin(b.heading))


def pheromone_action_choice(
    pmap: PheromoneMap, pose: Pose, now: float, rng: np.random.Generator
) -> float:
    """Pick left/straight/right with probability proportional to (max smell - own).

    Equal smells degrade to a uniform three-way choice; a fully fresh cone is
    effectively never chosen.
    """
    smells = [sector_smell(pmap, pose, a, now) for a in ACTION_ORDER]
    top = max(smells) + SMELL_EPSILON
    weights = [top - s for s in smells]
    r = rng.random() * sum(weights)
    acc = 0.0
    chosen = ACTION_ORDER[-1]
    for action, w in zip(ACTION_ORDER, weights):
        acc += w
        if r < acc:
            chosen = action
            break
    return wrap_heading(pose.heading + ACTION_TURNS[chosen])


def random_decide(view: LocalView, rng: np.random.Generator) -> Decision:
    """Keep heading with p=0.5, turn left/right 45 degrees with p=0.25 each."""
    u = rng.random()
    if u < 0.5:
        turn = 0.0
    elif u < 0.75:
        turn = ACTION_TURNS["left"]
    else:
        turn = ACTION_TURNS["right"]
    return Decision(wrap_heading(view.pose.heading + turn), [])


def dpr_decide(view: LocalView, rng: np.random.Generator) -> Decision:
    heading = pheromone_action_choice(view.pheromone, view.pose, view.now, rng)
    return Decision(heading, [Broadcast("map", MAP_SIZE)])


def _uniform_disc_point(
    center: tuple[float, float], radius: float, rng: np.random.Generator
) -> tuple[float, float]:
    r = radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return (center[0] + r * math.cos(theta), center[1] + r * math.sin(theta))


def connectivity_decide(view: LocalView, rng: np.random.Generator) -> Decision:
    """Keep flying while the predicted link/path to the root survives; else steer back.

    Case order: direct root link kept -> keep; direct link predicted lost ->
    random point inside the root's range disc; multi-hop path predicted kept
    -> keep; predicted broken -> closest neighbor that reaches the root
    without us; no path -> nearest neighbor; isolated -> keep.
    """
    broadcasts = [Broadcast("beacon", BEACON_SIZE)]
    g = view.graph
    me, root = view.self_id, view.root_id
    pose = view.pose
    horizon = view.decision_interval
    radio_range = view.radio_range
    root_pos = g.position(root)
    self_pred = predict_position(pose, horizon)

    def keep() -> Decision:
        return Decision(pose.heading, broadcasts)

    if g.has_edge(me, root):
        if math.dist(self_pred, root_pos) <= radio_range:
            return keep()
        target = _uniform_disc_point(root_pos, radio_range, rng)
        return Decision(bearing((pose.x, pose.y), target), broadcasts)

    if g.has_path(me, root):
        predicted = g.positions.copy()
        predicted[me] = self_pred
        for nb in view.neighbors:
            predicted[nb.id] = predicted_neighbor_position(nb, view.now, horizon)
        if build_graph(predicted, radio_range).has_path(me, root):
            return keep()
        rooted = g.reachable_from(root, exclude=me)
        providers = [nb for nb in view.neighbors if nb.id in rooted]
        candidates = providers or view.neighbors
        target_nb = min(
            candidates, key=lambda nb: (math.dist((pose.x, pose.y), nb.position), nb.id)
        )
        target = predicted_neighbor_position(target_nb, view.now, horizon)
        return Decision(bearing((pose.x, pose.y), target), broadcasts)

    if view.neighbors:
        target_nb = min(
            view.neighbors, key=lambda nb: (math.dist((pose.x, pose.y), nb.position), nb.id)
        )
        target = predicted_neighbor_position(target_nb, view.now, horizon)
        return Decision(bearing((pose.x, pose.y), target), broadcasts)

    return keep()


def khopca_update_weight(
    state: KhopcaState, own_id: int, neighbor_weights: list[tuple[int, int]]
) -> KhopcaState:
    """One synchronous clustering round from the neighbors' announced weights.

    Rules, first match wins: adopt max-1 below a higher neighbor; lone or
    all-min minimum becomes a head; adjacent heads keep only the smallest id;
    an unsupported intermediate weight decays by one.
    """
    w = state.weight
    w_max = state.k
    weights = [nw for _, nw in neighbor_weights]
    max_nb = max(weights) if weights else None

    if max_nb is not None and max_nb > w:
        new = max_nb - 1
    elif w == KHOPCA_MIN and (max_nb is None or max_nb == KHOPCA_MIN):
        new = w_max
    elif w == w_max and max_nb == w_max:
        head_ids = [nid for nid, nw in neighbor_weights if nw == w_max]
        new = w_max if own_id < min(head_ids) else w_max - 1
    elif KHOPCA_MIN < w < w_max and (max_nb is None or max_nb < w):
        new = w - 1
    else:
        new = w
    return replace(state, weight=new)


def khopca_decide(view: LocalView, rng: np.random.Generator) -> Decision:
    """Heads and low weights roam by pheromone; others follow the lowest weight.

    The follow branch fires with the configured probability and needs at
    least one neighbor with a known weight; otherwise it falls back to the
    pheromone selection. The weight beacon goes out on every decision, the
    map only when the pheromone branch ran.
    """
    st = view.khopca
    broadcasts = [Broadcast("weight", WEIGHT_SIZE)]
    pheromone_branch = st.weight == st.k or st.weight < st.threshold
    if not pheromone_branch and rng.random() < st.follow_probability:
        known = [
            (view.neighbor_weights[nb.id], nb.id, nb)
            for nb in view.neighbors
            if nb.id in view.neighbor_weights
        ]
        if known:
            _, _, target = min(known, key=lambda item: (item[0], item[1]))
            heading = bearing((view.pose.x, view.pose.y), target.position)
            return Decision(heading, broadcasts)
    heading = pheromone_action_choice(view.pheromone, view.pose, view.now, rng)
    broadcasts.append(Broadcast("map", MAP_SIZE))
    return Decision(heading, broadcasts)


def conncov_select_parent(view: LocalView) -> Optional[int]:
    """Neighbor with the fewest hops to the root (ties to the smallest id)."""
    hops = view.graph.hop_counts_from(view.root_id)
    candidates = [(hops[nb.id], nb.id) for nb in view.neighbors if hops[nb.id] != math.inf]
    if not candidates:
        return None
    return min(candidates)[1]


def conncov_decide(view: LocalView, rng: np.random.Generator) -> Decision:
    """Tree-keeping coverage: stay tethered to the tree, prefer the stalest path.

    Of the 8 absolute 45-degree headings, a candidate is feasible when the
    horizon-length extrapolation stays in-field and within 90% of radio range
    of the predicted position of at least one tree-connected neighbor (any
    neighbor with a finite hop count to the root; the preferred parent is the
    minimum-hop one). Feasible candidates are ranked by total pheromone along
    the predicted path, then by smallest turn, clockwise first. With no
    feasible candidate the UAV heads straight for the parent's prediction;
    without a parent the plain pheromone choice applies.
    """
    broadcasts = [Broadcast("beacon", BEACON_SIZE), Broadcast("map", MAP_SIZE)]
    pose = view.pose
    parent = conncov_select_parent(view)
    if parent is None:
        heading = pheromone_action_choice(view.pheromone, view.pose, view.now, rng)
        return Decision(heading, broadcasts, parent_id=None)

    horizon = view.decision_interval
    hops = view.graph.hop_counts_from(view.root_id)
    anchor_preds = [
        predicted_neighbor_position(nb, view.now, horizon)
        for nb in view.neighbors
        if hops[nb.id] != math.inf
    ]
    parent_pred = next(
        predicted_neighbor_position(nb, view.now, horizon)
        for nb in view.neighbors
        if nb.id == parent
    )
    max_dist = CONNCOV_RANGE_MARGIN * view.radio_range
    reach = pose.speed * horizon

    best = None
    best_key = None
    for cand in CONNCOV_CANDIDATES:
        px = pose.x + reach * math.cos(cand)
        py = pose.y + reach * math.sin(cand)
        if not view.field.contains(px, py):
            continue
        if all(math.dist((px, py), ap) > max_dist for ap in anchor_preds):
            continue
        smell = path_smell(
            view.pheromone, (pose.x, pose.y), cand, reach, view.now, PATH_SAMPLE_STEP
        )
        turn = signed_angle_diff(cand, pose.heading)
        key = (smell, abs(turn), turn > 0)
        if best_key is None or key < best_key:
            best_key = key
            best = cand
    if best is None:
        heading = bearing((pose.x, pose.y), parent_pred)
    else:
        heading = wrap_heading(best)
    return Decision(heading, broadcasts, parent_id=parent)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    interval: int  # seconds between decisions
    decide: Callable[[LocalView, np.random.Generator], Decision]
    uses_pheromone: bool


MODELS: dict[str, ModelSpec] = {
    "random": ModelSpec("random", 1, random_decide, False),
    "dpr": ModelSpec("dpr", 10, dpr_decide, True),
    "connectivity": ModelSpec("connectivity", 2, connectivity_decide, False),
    "khopca": ModelSpec("khopca", 30, khopca_decide, True),
    "conncov": ModelSpec("conncov", 30, conncov_decide, True),
}
