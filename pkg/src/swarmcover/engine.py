"""Deterministic time-stepped world loop.

Tick order: decisions (id order, at t mod interval == 0), broadcast delivery,
movement with the boundary rule, pheromone deposit, radio snapshot rebuild,
metric sampling, then t += 1. Every run is a pure function of its RunConfig:
one master seed spawns one placement stream plus one stream per UAV.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from .geometry import FieldSpec, Pose, random_inward_heading, wrap_heading
from .metrics import (
    MetricsRecord,
    RunSamples,
    ScanGrid,
    coverage_fraction,
    finalize,
    tick_sample,
)
from .mobility import (
    MODELS,
    Beacon,
    Broadcast,
    KhopcaState,
    LocalView,
    NeighborInfo,
    khopca_update_weight,
)
from .pheromone import DEFAULT_TAU, PheromoneMap, merge_into
from .radio import MessageLedger, RadioGraph, build_graph, record_broadcast

INITIAL_DEPLOY_RADIUS = 200.0


@dataclass
class UavState:
    id: int
    x: float
    y: float
    heading: float
    speed: float
    role: str = "mobile"  # mobile | root


@dataclass(frozen=True)
class RunConfig:
    """The unit of reproducibility: everything a single run depends on."""

    model: str
    n_uavs: int
    seed: int
    field: FieldSpec = FieldSpec()
    radio_range: float = 400.0
    sensor_range: float = 20.0
    speed: float = 5.0
    decision_interval: Optional[int] = None  # None -> model default
    time_cap: int = 50_000
    coverage_targets: tuple[float, float] = (0.80, 0.95)
    pheromone_tau: float = DEFAULT_TAU
    khopca_k: int = 3
    khopca_threshold: int = 2
    khopca_follow_probability: float = 0.2

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {sorted(MODELS)}")
        if self.n_uavs < 1:
            raise ValueError("n_uavs must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.radio_range <= 0 or self.sensor_range <= 0 or self.speed <= 0:
            raise ValueError("ranges and speed must be positive")
        if self.time_cap < 1:
            raise ValueError("time_cap must be at least 1 second")
        lo, hi = self.coverage_targets
        if not (0.0 < lo <= hi <= 1.0):
            raise ValueError("coverage targets must satisfy 0 < lo <= hi <= 1")
        if self.decision_interval is not None and self.decision_interval < 1:
            raise ValueError("decision_interval must be at least 1 second")

    @property
    def interval(self) -> int:
        return self.decision_interval or MODELS[self.model].interval


@dataclass
class WorldState:
    cfg: RunConfig
    uavs: list[UavState]
    root: UavState
    graph: RadioGraph
    grid: ScanGrid
    samples: RunSamples
    ledger: MessageLedger
    maps: Optional[list[PheromoneMap]]
    khopca: Optional[list[KhopcaState]]
    parents: list[Optional[int]]
    beacon_tables: list[dict[int, Beacon]]
    weight_tables: list[dict[int, int]]
    rngs: list[np.random.Generator]
    t: int = 0

    @property
    def root_id(self) -> int:
        return self.root.id

    def node_positions(self) -> np.ndarray:
        pos = np.empty((len(self.uavs) + 1, 2), dtype=np.float64)
        for u in self.uavs:
            pos[u.id, 0] = u.x
            pos[u.id, 1] = u.y
        pos[self.root.id, 0] = self.root.x
        pos[self.root.id, 1] = self.root.y
        return pos


def _seed_sequence(cfg: RunConfig) -> np.random.SeedSequence:
    # Model and UAV count are folded into the stream label so a (seed, cell)
    # pair always reproduces the same world regardless of sweep composition.
    return np.random.SeedSequence([cfg.seed, cfg.n_uavs, zlib.crc32(cfg.model.encode())])


def init_world(cfg: RunConfig) -> WorldState:
    """Root at field center, mobiles uniform in a 200 m disc around it."""
    n = cfg.n_uavs
    field = cfg.field
    streams = _seed_sequence(cfg).spawn(n + 1)
    placement = np.random.default_rng(streams[0])
    rngs = [np.random.default_rng(s) for s in streams[1:]]

    cx, cy = field.center
    root = UavState(id=n, x=cx, y=cy, heading=0.0, speed=0.0, role="root")
    uavs = []
    for i in range(n):
        r = INITIAL_DEPLOY_RADIUS * math.sqrt(placement.random())
        theta = 2.0 * math.pi * placement.random()
        x = min(max(cx + r * math.cos(theta), 0.0), field.width)
        y = min(max(cy + r * math.sin(theta), 0.0), field.height)
        heading = wrap_heading(2.0 * math.pi * placement.random())
        uavs.append(UavState(id=i, x=x, y=y, heading=heading, speed=cfg.speed))

    model = MODELS[cfg.model]
    maps = (
        [PheromoneMap(field, cfg.pheromone_tau) for _ in range(n)]
        if model.uses_pheromone
        else None
    )
    khopca = (
        [
            KhopcaState(
                k=cfg.khopca_k,
                threshold=cfg.khopca_threshold,
                follow_probability=cfg.khopca_follow_probability,
            )
            for _ in range(n)
        ]
        if cfg.model == "khopca"
        else None
    )
    world = WorldState(
        cfg=cfg,
        uavs=uavs,
        root=root,
        graph=RadioGraph(np.zeros((0, 2)), cfg.radio_range),
        grid=ScanGrid(field, cfg.sensor_range),
        samples=RunSamples.for_uavs(n),
        ledger=MessageLedger(),
        maps=maps,
        khopca=khopca,
        parents=[None] * n,
        beacon_tables=[dict() for _ in range(n)],
        weight_tables=[dict() for _ in range(n)],
        rngs=rngs,
    )
    world.graph = build_graph(world.node_positions(), cfg.radio_range)
    return world


def _build_view(world: WorldState, uav: UavState, neighbor_ids: list[int]) -> LocalView:
    beacons = world.beacon_tables[uav.id]
    weights = world.weight_tables[uav.id]
    pos = world.graph.positions
    neighbors = [
        NeighborInfo(nid, (pos[nid, 0], pos[nid, 1]), beacons.get(nid)) for nid in neighbor_ids
    ]
    return LocalView(
        self_id=uav.id,
        pose=Pose(uav.x, uav.y, uav.heading, uav.speed),
        now=float(world.t),
        field=world.cfg.field,
        radio_range=world.cfg.radio_range,
        decision_interval=float(world.cfg.interval),
        neighbors=neighbors,
        root_id=world.root_id,
        graph=world.graph,
        pheromone=world.maps[uav.id] if world.maps is not None else None,
        khopca=world.khopca[uav.id] if world.khopca is not None else None,
        neighbor_weights={nid: weights[nid] for nid in neighbor_ids if nid in weights},
        parent_id=world.parents[uav.id],
    )


def _advance_with_boundary(uav: UavState, field: FieldSpec, rng: np.random.Generator) -> None:
    """Move 1 s along the heading; stop at the boundary and re-aim inward."""
    dx = uav.speed * math.cos(uav.heading)
    dy = uav.speed * math.sin(uav.heading)
    nx, ny = uav.x + dx, uav.y + dy
    if field.contains(nx, ny):
        uav.x, uav.y = nx, ny
        return
    lam = 1.0
    if nx > field.width:
        lam = min(lam, (field.width - uav.x) / dx)
    elif nx < 0.0:
        lam = min(lam, -uav.x / dx)
    if ny > field.height:
        lam = min(lam, (field.height - uav.y) / dy)
    elif ny < 0.0:
        lam = min(lam, -uav.y / dy)
    uav.x = min(max(uav.x + lam * dx, 0.0), field.width)
    uav.y = min(max(uav.y + lam * dy, 0.0), field.height)
    uav.heading = random_inward_heading(Pose(uav.x, uav.y, uav.heading, uav.speed), field, rng)


def step(world: WorldState) -> WorldState:
    """Advance the world by one simulated second (see module docstring for order)."""
    cfg = world.cfg
    model = MODELS[cfg.model]
    t = world.t

    # (1) decisions, id order; broadcasts are snapshotted at enqueue time
    queue: list[tuple[int, Broadcast, object]] = []
    if t % cfg.interval == 0:
        for uav in world.uavs:
            neighbor_ids = [int(v) for v in world.graph.adj[uav.id]]
            if world.khopca is not None:
                table = world.weight_tables[uav.id]
                announced = [(nid, table[nid]) for nid in neighbor_ids if nid in table]
                world.khopca[uav.id] = khopca_update_weight(
                    world.khopca[uav.id], uav.id, announced
                )
            view = _build_view(world, uav, neighbor_ids)
            decision = model.decide(view, world.rngs[uav.id])
            uav.heading = wrap_heading(decision.new_heading)
            world.parents[uav.id] = decision.parent_id
            for b in decision.broadcasts:
                if b.kind == "beacon":
                    payload: object = Beacon(uav.x, uav.y, uav.heading, uav.speed, float(t))
                elif b.kind == "map":
                    payload = world.maps[uav.id].copy()
                elif b.kind == "weight":
                    payload = world.khopca[uav.id].weight
                else:
                    raise ValueError(f"unknown broadcast kind {b.kind!r}")
                queue.append((uav.id, b, payload))

    # (2) delivery to current radio neighbors; one ledger entry per broadcast
    root_id = world.root.id
    for sender, b, payload in queue:
        record_broadcast(world.ledger, b.size_units)
        for nid in world.graph.adj[sender]:
            nid = int(nid)
            if nid == root_id:
                continue  # the root is a passive gateway
            if b.kind == "beacon":
                world.beacon_tables[nid][sender] = payload
            elif b.kind == "map":
                merge_into(world.maps[nid], payload)
            else:
                world.weight_tables[nid][sender] = payload

    # (3) movement with boundary handling
    for uav in world.uavs:
        _advance_with_boundary(uav, cfg.field, world.rngs[uav.id])
        assert cfg.field.contains(uav.x, uav.y), "UAV left the field"

    # (3b) pheromone deposit of the sensor footprint along the way
    if world.maps is not None:
        for uav in world.uavs:
            world.maps[uav.id].deposit_disc((uav.x, uav.y), cfg.sensor_range, float(t))

    # (4) fresh radio snapshot
    positions = world.node_positions()
    world.graph = build_graph(positions, cfg.radio_range)

    # (5) per-second metric sample
    tick_sample(world.grid, world.samples, positions[:-1], world.graph, world.root_id)

    world.t = t + 1
    return world


def _write_trace_line(out: IO[str], world: WorldState) -> None:
    parts = [str(world.t)]
    for uav in world.uavs:
        parts.extend((str(uav.x), str(uav.y), str(uav.heading)))
    parts.append(str(world.samples.component_counts[-1]))
    out.write(",".join(parts) + "\n")


def run(cfg: RunConfig, trace_path: Optional[str] = None) -> MetricsRecord:
    """Step until 95% coverage or the time cap; return the run's metrics."""
    world = init_world(cfg)
    target_80, target_95 = cfg.coverage_targets
    time_to_80: Optional[int] = None
    time_to_95: Optional[int] = None
    trace: Optional[IO[str]] = None
    if trace_path is not None:
        trace = open(trace_path, "w", encoding="utf-8")
        header = ["t"]
        for uav in world.uavs:
            header.extend((f"x{uav.id}", f"y{uav.id}", f"heading{uav.id}"))
        header.append("components")
        trace.write(",".join(header) + "\n")
    try:
        while world.t < cfg.time_cap:
            step(world)
            if trace is not None:
                _write_trace_line(trace, world)
            fraction = coverage_fraction(world.grid)
            if time_to_80 is None and fraction >= target_80:
                time_to_80 = world.t
            if fraction >= target_95:
                time_to_95 = world.t
                break
    finally:
        if trace is not None:
            trace.close()
    return finalize(world.grid, world.samples, world.ledger, world.t, time_to_80, time_to_95)
