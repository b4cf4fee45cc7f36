import math

import numpy as np
import pytest

from swarmcover.geometry import FieldSpec, GridKind, cells_in_disc
from swarmcover.metrics import (
    MetricsRecord,
    RunSamples,
    ScanGrid,
    coverage_fraction,
    fairness_cv,
    finalize,
    tick_sample,
)
from swarmcover.radio import MessageLedger, build_graph, record_broadcast

FIELD = FieldSpec()
SMALL = FieldSpec(width=40.0, height=20.0, measure_cell=1.0, pheromone_cell=5.0)


def disc_union_cells(positions, radius=20.0, field=FIELD):
    out = set()
    for pos in positions:
        out |= {
            (c.col, c.row) for c in cells_in_disc(pos, radius, field, GridKind.MEASUREMENT)
        }
    return out


class TestScanGrid:
    def test_overlapping_uavs_count_once(self):
        grid = ScanGrid(FIELD, 20.0)
        grid.mark_scans([(1000.0, 500.0), (1000.0, 500.0)])
        assert grid.scanned_seconds.max() == 1

    def test_partial_overlap_counts_once_per_cell(self):
        grid = ScanGrid(FIELD, 20.0)
        positions = [(1000.0, 500.0), (1010.0, 500.0)]
        grid.mark_scans(positions)
        assert grid.scanned_seconds.max() == 1
        assert grid.covered_cell_count == len(disc_union_cells(positions))

    def test_fresh_cells_match_disc_union_oracle(self):
        grid = ScanGrid(FIELD, 20.0)
        fresh = grid.mark_scans([(700.0, 300.0)])
        assert fresh == len(disc_union_cells([(700.0, 300.0)]))
        # moving 5 m: fresh gain is the set difference of the two discs
        fresh2 = grid.mark_scans([(705.0, 300.0)])
        union = disc_union_cells([(700.0, 300.0), (705.0, 300.0)])
        assert grid.covered_cell_count == len(union)
        assert fresh2 == len(union) - fresh

    def test_scanned_cells_accumulate_per_second(self):
        grid = ScanGrid(FIELD, 20.0)
        for _ in range(3):
            grid.mark_scans([(1000.0, 500.0)])
        assert grid.scanned_seconds.max() == 3

    def test_boundary_disc_is_clipped(self):
        grid = ScanGrid(FIELD, 20.0)
        fresh = grid.mark_scans([(0.0, 0.0)])
        assert fresh == len(disc_union_cells([(0.0, 0.0)]))


class TestTickSample:
    def test_connectivity_flags_with_chain_to_root(self):
        grid = ScanGrid(FIELD, 20.0)
        samples = RunSamples.for_uavs(2)
        positions = [(700.0, 500.0), (850.0, 500.0)]
        graph = build_graph(positions + [(1000.0, 500.0)], 400.0)
        tick_sample(grid, samples, positions, graph, root_id=2)
        assert samples.component_counts == [1]
        assert samples.fully_connected_seconds == 1
        assert samples.root_reach_seconds.tolist() == [1, 1]

    def test_fragmented_topology(self):
        grid = ScanGrid(FIELD, 20.0)
        samples = RunSamples.for_uavs(2)
        positions = [(100.0, 500.0), (850.0, 500.0)]
        graph = build_graph(positions + [(1000.0, 500.0)], 400.0)
        tick_sample(grid, samples, positions, graph, root_id=2)
        assert samples.component_counts == [2]
        assert samples.fully_connected_seconds == 0
        assert samples.root_reach_seconds.tolist() == [0, 1]

    def test_full_connectivity_implies_all_reach_root(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            positions = [
                (float(x) * 2000.0, float(y) * 1000.0) for x, y in rng.random((n, 2))
            ]
            graph = build_graph(positions + [(1000.0, 500.0)], 400.0)
            grid = ScanGrid(FIELD, 20.0)
            samples = RunSamples.for_uavs(n)
            tick_sample(grid, samples, positions, graph, root_id=n)
            if samples.fully_connected_seconds == 1:
                assert samples.root_reach_seconds.tolist() == [1] * n
            assert 1 <= samples.component_counts[0] <= n + 1


class TestCoverageFraction:
    def test_fresh_grid_is_zero(self):
        assert coverage_fraction(ScanGrid(FIELD, 20.0)) == 0.0

    def test_all_scanned_is_one(self):
        grid = ScanGrid(SMALL, 20.0)
        grid.scanned_seconds[:, :] = 1
        grid.covered_cell_count = grid.total_cells
        assert coverage_fraction(grid) == 1.0

    def test_single_disc_on_full_field(self):
        grid = ScanGrid(FIELD, 20.0)
        grid.mark_scans([(1000.5, 500.5)])
        assert coverage_fraction(grid) == 1257 / 2_000_000


class TestFairnessCv:
    def test_uniform_scanning_is_zero(self):
        grid = ScanGrid(SMALL, 20.0)
        grid.scanned_seconds[:, :] = 3
        assert fairness_cv(grid) == 0.0

    def test_two_point_distribution(self):
        grid = ScanGrid(SMALL, 20.0)
        half = grid.scanned_seconds.shape[1] // 2
        grid.scanned_seconds[:, :half] = 2
        assert fairness_cv(grid) == pytest.approx(1.0)

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(10)
        grid = ScanGrid(SMALL, 20.0)
        grid.scanned_seconds = rng.integers(0, 50, size=grid.scanned_seconds.shape).astype(
            np.uint32
        )
        values = [int(v) for v in grid.scanned_seconds.ravel()]
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        expected = math.sqrt(var) / mean
        assert fairness_cv(grid) == pytest.approx(expected, rel=1e-9)

    def test_all_zero_grid_raises(self):
        with pytest.raises(ValueError):
            fairness_cv(ScanGrid(SMALL, 20.0))


class TestFinalize:
    def _grid(self):
        grid = ScanGrid(SMALL, 20.0)
        grid.mark_scans([(20.0, 10.0)])
        return grid

    def test_never_fragmenting_run(self):
        samples = RunSamples.for_uavs(2)
        samples.component_counts = [1, 1, 1, 1]
        samples.fully_connected_seconds = 4
        samples.root_reach_seconds = np.array([4, 4])
        rec = finalize(self._grid(), samples, MessageLedger(), 4, 2, 4)
        assert rec.connected_pct == 1.0
        assert rec.avg_components == 1.0
        assert rec.root_conn_pct == 1.0
        assert not rec.censored
        assert (rec.time_to_80, rec.time_to_95) == (2.0, 4.0)

    def test_half_connected_run(self):
        samples = RunSamples.for_uavs(1)
        samples.component_counts = [1] * 300 + [2] * 300
        samples.fully_connected_seconds = 300
        samples.root_reach_seconds = np.array([300])
        rec = finalize(self._grid(), samples, MessageLedger(), 600, 100, 200)
        assert rec.connected_pct == 0.5
        assert rec.avg_components == 1.5

    def test_per_uav_root_connectivity_average(self):
        samples = RunSamples.for_uavs(2)
        samples.component_counts = [2] * 10
        samples.fully_connected_seconds = 0
        samples.root_reach_seconds = np.array([10, 0])  # one always, one never
        rec = finalize(self._grid(), samples, MessageLedger(), 10, None, None)
        assert rec.root_conn_pct == 0.5
        assert rec.censored
        assert math.isnan(rec.time_to_95)

    def test_ledger_is_copied(self):
        samples = RunSamples.for_uavs(1)
        samples.component_counts = [1]
        samples.fully_connected_seconds = 1
        samples.root_reach_seconds = np.array([1])
        ledger = MessageLedger()
        record_broadcast(ledger, 10_000)
        rec = finalize(self._grid(), samples, ledger, 1, 1, 1)
        assert (rec.message_count, rec.total_message_size) == (1, 10_000)

    def test_csv_row_shape(self):
        samples = RunSamples.for_uavs(1)
        samples.component_counts = [1]
        samples.fully_connected_seconds = 1
        samples.root_reach_seconds = np.array([1])
        rec = finalize(self._grid(), samples, MessageLedger(), 1, 1, 1)
        assert len(rec.to_csv_values()) == 10
