"""Deterministic drone-swarm area-coverage simulator.

Five distributed mobility models (random walk, distributed pheromone repel,
connectivity-based, KHOPCA-based clustering, connected coverage) run on a
time-stepped planar world; per-run metrics cover coverage speed, fairness,
connectivity and message traffic.
"""

from .engine import RunConfig, UavState, WorldState, init_world, run, step
from .geometry import CellIndex, FieldSpec, GridKind, Pose, cells_in_disc, predict_position
from .harness import AggregateRow, ExperimentConfig, emit_tables, run_experiment
from .metrics import MetricsRecord
from .mobility import MODELS, Decision, KhopcaState, LocalView
from .pheromone import PheromoneMap
from .radio import MessageLedger, RadioGraph, build_graph

__version__ = "0.1.0"

__all__ = [
    "AggregateRow",
    "CellIndex",
    "Decision",
    "ExperimentConfig",
    "FieldSpec",
    "GridKind",
    "KhopcaState",
    "LocalView",
    "MODELS",
    "MessageLedger",
    "MetricsRecord",
    "PheromoneMap",
    "Pose",
    "RadioGraph",
    "RunConfig",
    "UavState",
    "WorldState",
    "build_graph",
    "cells_in_disc",
    "emit_tables",
    "init_world",
    "predict_position",
    "run",
    "run_experiment",
    "step",
]
