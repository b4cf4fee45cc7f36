"""Per-tick radio proximity graph and the broadcast ledger.

Nodes are indexed 0..n-1 (the engine places the stationary root last). An
edge exists iff the Euclidean distance is <= range, boundary inclusive. The
graph is an immutable per-tick snapshot; queries never mutate it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np


class RadioGraph:
    """Symmetric, irreflexive proximity graph over node positions."""

    def __init__(self, positions: np.ndarray, range_m: float):
        positions = np.asarray(positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ValueError("positions must be an (n, 2) array")
        if not np.isfinite(positions).all():
            raise ValueError("positions must be finite")
        self.positions = positions
        self.range = float(range_m)
        diff = positions[:, None, :] - positions[None, :, :]
        d2 = (diff * diff).sum(axis=2)
        adj = d2 <= self.range * self.range
        np.fill_diagonal(adj, False)
        self._adj_matrix = adj
        self._adj_lists: list[np.ndarray] | None = None
        self._hops_cache: dict[int, list[float]] = {}

    @property
    def adj(self) -> list[np.ndarray]:
        if self._adj_lists is None:
            self._adj_lists = [np.nonzero(row)[0] for row in self._adj_matrix]
        return self._adj_lists

    def __len__(self) -> int:
        return len(self.positions)

    def _check(self, u: int) -> None:
        if not 0 <= u < len(self):
            raise KeyError(f"unknown node id {u}")

    def position(self, u: int) -> tuple[float, float]:
        self._check(u)
        return (float(self.positions[u, 0]), float(self.positions[u, 1]))

    def neighbors(self, u: int) -> list[int]:
        self._check(u)
        return [int(v) for v in self.adj[u]]

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return bool(self._adj_matrix[u, v])

    def has_path(self, u: int, v: int) -> bool:
        """True iff u and v share a component; a node always reaches itself."""
        self._check(u)
        self._check(v)
        if u == v:
            return True
        seen = bytearray(len(self))
        seen[u] = 1
        queue = deque((u,))
        while queue:
            w = queue.popleft()
            for nb in self.adj[w]:
                if nb == v:
                    return True
                if not seen[nb]:
                    seen[nb] = 1
                    queue.append(nb)
        return False

    def hop_counts_from(self, root: int) -> list[float]:
        """BFS hop distance from ``root`` per node, math.inf when unreachable."""
        self._check(root)
        cached = self._hops_cache.get(root)
        if cached is None:
            hops = [math.inf] * len(self)
            hops[root] = 0
            queue = deque((root,))
            while queue:
                w = queue.popleft()
                for nb in self.adj[w]:
                    if hops[nb] == math.inf:
                        hops[nb] = hops[w] + 1
                        queue.append(nb)
            self._hops_cache[root] = cached = hops
        return list(cached)

    def reachable_from(self, start: int, exclude: int | None = None) -> set[int]:
        """Nodes reachable from ``start`` when ``exclude`` is removed from the graph."""
        self._check(start)
        if start == exclude:
            return set()
        seen = {start}
        queue = deque((start,))
        while queue:
            w = queue.popleft()
            for nb in self.adj[w]:
                nb = int(nb)
                if nb != exclude and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return seen


def build_graph(positions: np.ndarray | list[tuple[float, float]], range_m: float) -> RadioGraph:
    return RadioGraph(np.asarray(positions, dtype=np.float64), range_m)


def connected_components(g: RadioGraph) -> tuple[int, list[int]]:
    """Component count and a 0-based component label per node.

    Vectorised frontier expansion over the adjacency matrix; labels are
    assigned in node order, so they are a deterministic function of the graph.
    """
    n = len(g)
    adj = g._adj_matrix
    labels = np.full(n, -1, dtype=np.int64)
    label = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        comp = np.zeros(n, dtype=bool)
        comp[s] = True
        frontier = comp.copy()
        while frontier.any():
            grown = adj[frontier].any(axis=0)
            frontier = grown & ~comp
            comp |= frontier
        labels[comp] = label
        label += 1
    return label, [int(x) for x in labels]


@dataclass
class MessageLedger:
    """Transmitter-side broadcast accounting: one send = one message."""

    message_count: int = 0
    total_size: int = 0


def record_broadcast(ledger: MessageLedger, size_units: int) -> None:
    if size_units <= 0:
        raise ValueError("size_units must be positive")
    ledger.message_count += 1
    ledger.total_size += size_units
