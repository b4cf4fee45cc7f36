import math

import numpy as np
import pytest

from swarmcover.engine import RunConfig, init_world, run, step
from swarmcover.geometry import FieldSpec
from swarmcover.metrics import coverage_fraction
from swarmcover.radio import connected_components

SMALL_FIELD = FieldSpec(width=200.0, height=100.0, measure_cell=1.0, pheromone_cell=5.0)


def small_cfg(model, n_uavs=3, seed=1, **kw):
    return RunConfig(model=model, n_uavs=n_uavs, seed=seed, field=SMALL_FIELD, **kw)


class TestRunConfig:
    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(model="teleport", n_uavs=4, seed=1)

    def test_invalid_counts_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(model="random", n_uavs=0, seed=1)

    def test_model_default_intervals(self):
        assert RunConfig(model="random", n_uavs=1, seed=0).interval == 1
        assert RunConfig(model="dpr", n_uavs=1, seed=0).interval == 10
        assert RunConfig(model="connectivity", n_uavs=1, seed=0).interval == 2
        assert RunConfig(model="khopca", n_uavs=1, seed=0).interval == 30
        assert RunConfig(model="conncov", n_uavs=1, seed=0).interval == 30


class TestInitWorld:
    def test_same_config_gives_identical_world(self):
        cfg = RunConfig(model="random", n_uavs=6, seed=42)
        a, b = init_world(cfg), init_world(cfg)
        assert [(u.x, u.y, u.heading) for u in a.uavs] == [
            (u.x, u.y, u.heading) for u in b.uavs
        ]

    def test_root_is_stationary_field_center(self):
        for seed in (0, 7, 123):
            world = init_world(RunConfig(model="random", n_uavs=4, seed=seed))
            assert (world.root.x, world.root.y) == (1000.0, 500.0)
            assert world.root.role == "root"
            assert world.root.speed == 0.0

    def test_initial_topology_is_connected(self):
        world = init_world(RunConfig(model="random", n_uavs=10, seed=3))
        count, _ = connected_components(world.graph)
        assert count == 1

    def test_deployment_inside_200m_disc(self):
        world = init_world(RunConfig(model="random", n_uavs=30, seed=5))
        for u in world.uavs:
            assert math.dist((u.x, u.y), (1000.0, 500.0)) <= 200.0

    def test_different_models_fold_into_the_stream(self):
        a = init_world(RunConfig(model="random", n_uavs=4, seed=1))
        b = init_world(RunConfig(model="dpr", n_uavs=4, seed=1))
        assert [(u.x, u.y) for u in a.uavs] != [(u.x, u.y) for u in b.uavs]


class TestStep:
    def test_random_model_moves_exactly_speed_per_second(self):
        world = init_world(RunConfig(model="random", n_uavs=5, seed=2))
        for _ in range(50):
            before = [(u.x, u.y) for u in world.uavs]
            step(world)
            for (bx, by), u in zip(before, world.uavs):
                moved = math.dist((bx, by), (u.x, u.y))
                on_boundary = (
                    u.x in (0.0, world.cfg.field.width) or u.y in (0.0, world.cfg.field.height)
                )
                assert moved == pytest.approx(5.0, abs=1e-9) or (on_boundary and moved <= 5.0)

    def test_identical_seeds_identical_traces(self):
        cfg = RunConfig(model="random", n_uavs=4, seed=9)
        w1, w2 = init_world(cfg), init_world(cfg)
        for _ in range(1000):
            step(w1)
            step(w2)
        assert [(u.x, u.y, u.heading) for u in w1.uavs] == [
            (u.x, u.y, u.heading) for u in w2.uavs
        ]

    def test_dpr_pair_broadcast_accounting(self):
        # both UAVs decide at t=0 and send one full map each
        world = init_world(RunConfig(model="dpr", n_uavs=2, seed=1))
        step(world)
        assert world.ledger.message_count == 2
        assert world.ledger.total_size == 20_000

    def test_map_broadcast_merges_into_neighbor(self):
        world = init_world(RunConfig(model="dpr", n_uavs=2, seed=1))
        for _ in range(10):
            step(world)  # deposits happen from t=0; second decision at t=10
        # before the t=10 exchange both maps only hold their own trail
        own = [m.last_visit > -math.inf for m in world.maps]
        step(world)
        merged = [m.last_visit > -math.inf for m in world.maps]
        assert (merged[0] & own[1]).sum() == own[1].sum()  # received the peer trail
        assert (merged[1] & own[0]).sum() == own[0].sum()

    def test_positions_stay_in_field(self):
        world = init_world(small_cfg("random", n_uavs=4, seed=3))
        for _ in range(400):
            step(world)
            for u in world.uavs:
                assert world.cfg.field.contains(u.x, u.y)

    def test_boundary_stop_redirects_inward(self):
        world = init_world(small_cfg("random", n_uavs=8, seed=11))
        hits = 0
        for _ in range(300):
            step(world)
            for u in world.uavs:
                if u.x in (0.0, 200.0) or u.y in (0.0, 100.0):
                    hits += 1
                    nx = u.x + u.speed * math.cos(u.heading)
                    ny = u.y + u.speed * math.sin(u.heading)
                    assert world.cfg.field.contains(nx, ny)
        assert hits > 0

    def test_khopca_weights_settle_to_clusters(self):
        world = init_world(RunConfig(model="khopca", n_uavs=5, seed=4))
        for _ in range(61):
            step(world)  # three decision rounds at t=0, 30, 60
        weights = [s.weight for s in world.khopca]
        assert all(1 <= w <= 3 for w in weights)
        assert 3 in weights  # at least one cluster head emerges

    def test_coverage_fraction_non_decreasing(self):
        world = init_world(small_cfg("dpr", n_uavs=3, seed=6))
        last = 0.0
        for _ in range(200):
            step(world)
            frac = coverage_fraction(world.grid)
            assert frac >= last
            last = frac


class TestRun:
    def test_time80_before_time95(self):
        rec = run(small_cfg("random", n_uavs=4, seed=1, time_cap=5_000))
        assert not rec.censored
        assert rec.time_to_80 <= rec.time_to_95

    def test_tiny_cap_censors(self):
        rec = run(RunConfig(model="random", n_uavs=4, seed=1, time_cap=10))
        assert rec.censored
        assert rec.stop_time == 10
        assert math.isnan(rec.time_to_95)

    def test_random_model_sends_nothing(self):
        rec = run(small_cfg("random", n_uavs=4, seed=2, time_cap=2_000))
        assert rec.message_count == 0
        assert rec.total_message_size == 0

    def test_scan_seconds_bounded_by_disc_budget(self):
        cfg = small_cfg("random", n_uavs=3, seed=8, time_cap=150)
        world = init_world(cfg)
        while world.t < cfg.time_cap:
            step(world)
        max_disc_cells = 1257  # frozen disc-enumeration oracle value
        total = int(world.grid.scanned_seconds.sum())
        assert total <= cfg.n_uavs * cfg.time_cap * max_disc_cells

    def test_identical_records_across_executions(self):
        cfg = small_cfg("conncov", n_uavs=3, seed=5, time_cap=400)
        assert run(cfg) == run(cfg)

    def test_trace_dump_shape(self, tmp_path):
        path = tmp_path / "trace.csv"
        rec = run(small_cfg("random", n_uavs=2, seed=3, time_cap=50), trace_path=str(path))
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "t,x0,y0,heading0,x1,y1,heading1,components"
        assert len(lines) == 1 + rec.stop_time
        first = lines[1].split(",")
        assert len(first) == 8
        assert first[0] == "1"
