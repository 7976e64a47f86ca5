"""Size-constrained maximum-weight independent set on conflict graphs.

Every feasible schedule holds exactly one vertex per (c, b, z) slot, so both
solvers work slot by slot: the cardinality constraint and per-slot coverage
come for free and the search only has to respect the edges.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _backend
from .graph import Association, ConflictGraph, CoordinationMode


@dataclass(frozen=True)
class Schedule:
    associations: tuple[Association, ...]  # sorted
    mode: CoordinationMode
    total_weight: float

    @classmethod
    def from_vertices(cls, graph: ConflictGraph, vertex_ids: Iterable[int]) -> Schedule:
        ids = sorted(int(v) for v in vertex_ids)
        total = 0.0
        for v in ids:
            total += graph.weights[v]
        return cls(tuple(graph.association(v) for v in ids), graph.mode, float(total))

    def __len__(self):
        return len(self.associations)

    def vertex_ids(self, shape) -> list[int]:
        return [int(np.ravel_multi_index(a, shape)) for a in self.associations]

    def indicators(self, shape) -> np.ndarray:
        """Binary ``X[c, u, b, z]``."""
        x = np.zeros(shape, dtype=np.int64)
        for a in self.associations:
            x[a] += 1
        return x


@dataclass(frozen=True)
class SolveReport:
    schedule: Schedule | None  # None when no schedule of size Z_tot exists
    optimal: bool
    nodes_explored: int
    wall_time: float

    @property
    def feasible(self) -> bool:
        return self.schedule is not None

    @property
    def total_weight(self) -> float:
        if self.schedule is None:
            raise ValueError("infeasible instance has no schedule weight")
        return self.schedule.total_weight


def pigeonhole_infeasible(graph: ConflictGraph) -> bool:
    """Every mode needs C*B distinct users on a PZ layer (or one per BS)."""
    C, U, B, _ = graph.shape
    return U < C * B


def _tolerance(graph: ConflictGraph) -> float:
    scale = np.abs(graph.weights[graph.slot_order[:, 0]]).sum() if graph.n else 0.0
    return 1e-12 * (scale + 1.0)


def solve_exact(graph: ConflictGraph) -> SolveReport:
    """Heaviest independent set of size exactly ``graph.z_tot``.

    Branch and bound over slots in (c, b, z) order, trying each slot's
    users heaviest first. The bound adds, for every open slot, the weight
    of its heaviest vertex not adjacent to the partial schedule. Among
    equal-weight optima the lexicographically smallest set is returned.
    """
    t0 = time.perf_counter()
    if pigeonhole_infeasible(graph):
        return SolveReport(None, True, 0, time.perf_counter() - t0)
    indptr, indices = graph.csr
    best, nodes = _backend.kernels().bnb_search(
        indptr, indices, graph.weights, graph.slot_order, _tolerance(graph)
    )
    schedule = Schedule.from_vertices(graph, best) if len(best) else None
    return SolveReport(schedule, True, int(nodes), time.perf_counter() - t0)


def solve_greedy(graph: ConflictGraph, local_search_passes: int = 2) -> SolveReport:
    """Greedy slot filling followed by pairwise-swap local search.

    If the greedy pass dead-ends, a first-feasible depth-first search
    supplies the starting schedule instead.
    """
    t0 = time.perf_counter()
    if pigeonhole_infeasible(graph):
        return SolveReport(None, False, 0, time.perf_counter() - t0)
    k = _backend.kernels()
    indptr, indices = graph.csr
    order = graph.slot_order
    assign, ok = k.greedy_assign(indptr, indices, graph.weights, order)
    nodes = graph.z_tot
    if not ok:
        found, extra = k.bnb_search(indptr, indices, graph.weights, order, 0.0, True)
        nodes += int(extra)
        if not len(found):
            return SolveReport(None, False, nodes, time.perf_counter() - t0)
        # back to one vertex per slot, in slot order
        slot_of = np.empty(graph.n, dtype=np.int64)
        slot_of[graph.slot_vertices.ravel()] = np.repeat(np.arange(graph.z_tot), graph.shape[1])
        assign = np.empty(graph.z_tot, dtype=np.int64)
        assign[slot_of[found]] = found
    if local_search_passes > 0:
        assign, moves = k.local_search(indptr, indices, graph.weights, order, assign, local_search_passes)
        nodes += int(moves)
    schedule = Schedule.from_vertices(graph, assign)
    return SolveReport(schedule, False, nodes, time.perf_counter() - t0)


def validate_schedule(s: Schedule, graph: ConflictGraph) -> bool:
    """Check a schedule against both the graph and the indicator constraints.

    The indicator check rebuilds X, Y and Z from the associations and tests
    the mode's integer-program constraints directly, without the graph.
    """
    C, U, B, Z = graph.shape
    if s is None or len(s.associations) != graph.z_tot:
        return False
    for a in s.associations:
        if len(a) != 4 or not all(0 <= i < n for i, n in zip(a, graph.shape)):
            return False
    if len(set(s.associations)) != len(s.associations):
        return False

    ids = s.vertex_ids(graph.shape)
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if graph.has_edge(ids[i], ids[j]):
                return False

    x = s.indicators(graph.shape)
    if x.max() > 1:
        return False
    # each (c, b, z) served by exactly one user
    if not np.all(x.sum(axis=1) == 1):
        return False
    mode = graph.mode
    if mode in (CoordinationMode.HYBRID, CoordinationMode.SIGNAL):
        y_uz = x.sum(axis=(0, 2))
        if np.any(y_uz > 1):
            return False
    if mode is CoordinationMode.HYBRID:
        z_cu = (x.sum(axis=(2, 3)) > 0).astype(int)
        if np.any(z_cu.sum(axis=0) > 1):
            return False
    if mode is CoordinationMode.SCHEDULING:
        y_cub = np.minimum(x.sum(axis=3), 1)
        if np.any(y_cub.sum(axis=(0, 2)) > 1):
            return False
    return True
