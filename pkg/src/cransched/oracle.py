"""Brute-force ground truth over the feasible-schedule set.

Schedules are enumerated from the integer-program constraints of each
coordination mode (indicator variables X, Y, Z), never from the conflict
graph's edge rules, so the two routes can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _backend
from ._pykernels import iter_feasible_assignments
from .graph import Association, ConflictGraph, CoordinationMode
from .network import UtilityTensor
from .solver import Schedule

DEFAULT_CAP = 12


class EnumerationCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FeasibleSetSpec:
    mode: CoordinationMode
    num_clouds: int
    num_bs_per_cloud: int
    num_pz_per_bs: int
    num_users: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        object.__setattr__(self, "mode", CoordinationMode(self.mode))

    @classmethod
    def from_config(cls, mode, config, cap: int = DEFAULT_CAP) -> FeasibleSetSpec:
        return cls(mode, config.num_clouds, config.num_bs_per_cloud,
                   config.num_pz_per_bs, config.num_users, cap)

    @property
    def shape(self):
        return (self.num_clouds, self.num_users, self.num_bs_per_cloud, self.num_pz_per_bs)

    @property
    def z_tot(self) -> int:
        return self.num_clouds * self.num_bs_per_cloud * self.num_pz_per_bs

    def check_cap(self):
        if self.z_tot > self.cap:
            raise EnumerationCapExceeded(
                f"{self.z_tot} slots exceed the enumeration cap of {self.cap}")


@dataclass(frozen=True)
class OracleScan:
    count: int
    digest: int  # order-independent fingerprint of the whole feasible set
    best: Schedule | None


def _weights(spec: FeasibleSetSpec, tensor) -> np.ndarray:
    if tensor is None:
        return np.zeros(int(np.prod(spec.shape)))
    value = tensor.value if isinstance(tensor, UtilityTensor) else np.asarray(tensor, dtype=float)
    if value.shape != spec.shape:
        raise ValueError(f"utility tensor shape {value.shape} does not match {spec.shape}")
    return np.ascontiguousarray(value, dtype=float).ravel()


def _schedule(spec, ids, w) -> Schedule:
    ids = sorted(int(v) for v in ids)
    total = 0.0
    for v in ids:
        total += w[v]
    assocs = tuple(Association(*map(int, np.unravel_index(v, spec.shape))) for v in ids)
    return Schedule(assocs, spec.mode, float(total))


def enumerate_feasible(spec: FeasibleSetSpec, tensor=None) -> Iterator[Schedule]:
    """Yield every feasible schedule exactly once.

    ``total_weight`` is taken from ``tensor`` when given, else 0.
    """
    spec.check_cap()
    C, U, B, Z = spec.shape
    w = _weights(spec, tensor)
    slots = [(c, b, z) for c in range(C) for b in range(B) for z in range(Z)]
    for users in iter_feasible_assignments(C, B, Z, U, spec.mode.code):
        ids = [((c * U + u) * B + b) * Z + z for (c, b, z), u in zip(slots, users)]
        yield _schedule(spec, ids, w)


def scan_feasible(spec: FeasibleSetSpec, tensor=None) -> OracleScan:
    """Count and fingerprint the feasible set and find its best schedule."""
    spec.check_cap()
    C, U, B, Z = spec.shape
    w = _weights(spec, tensor)
    tol = 1e-12 * (np.abs(w).max(initial=0.0) * spec.z_tot + 1.0)
    count, digest, best = _backend.kernels().oracle_scan(
        C, B, Z, U, spec.mode.code, w, _backend.vertex_keys(w.size), tol)
    return OracleScan(int(count), int(digest), _schedule(spec, best, w) if len(best) else None)


def count_feasible(spec: FeasibleSetSpec) -> int:
    return scan_feasible(spec).count


def brute_force_opt(spec: FeasibleSetSpec, tensor) -> Schedule | None:
    """Best feasible schedule (lexicographic tie-break), or None if the
    feasible set is empty."""
    return scan_feasible(spec, tensor).best


def scan_independent_sets(graph: ConflictGraph) -> OracleScan:
    """Generic enumeration of independent sets of size ``z_tot`` in a graph.

    Knows nothing about slots; shares only the fingerprint scheme with
    :func:`scan_feasible`.
    """
    indptr, indices = graph.csr
    count, digest, best = _backend.kernels().graph_scan(
        indptr, indices, graph.z_tot, graph.weights, _backend.vertex_keys(graph.n))
    best_schedule = Schedule.from_vertices(graph, best) if len(best) else None
    return OracleScan(int(count), int(digest), best_schedule)


def independent_sets(graph: ConflictGraph, size: int | None = None) -> Iterator[frozenset[int]]:
    """All independent sets of ``size`` vertices (default ``z_tot``), as
    vertex-id sets. Plain Python; meant for small graphs."""
    k = graph.z_tot if size is None else size
    n = graph.n
    nbr = [set(int(x) for x in graph.neighbors(v)) for v in range(n)]

    def rec(start, chosen, blocked):
        if len(chosen) == k:
            yield frozenset(chosen)
            return
        for v in range(start, n - (k - len(chosen)) + 1):
            if v in blocked:
                continue
            chosen.append(v)
            yield from rec(v + 1, chosen, blocked | nbr[v])
            chosen.pop()

    yield from rec(0, [], frozenset())


@dataclass(frozen=True)
class Equivalence:
    mode: CoordinationMode
    oracle_count: int
    graph_count: int
    sets_match: bool
    optimum_match: bool

    @property
    def passed(self) -> bool:
        return self.sets_match and self.optimum_match


def check_equivalence(graph: ConflictGraph, cap: int = DEFAULT_CAP, rel_tol: float = 1e-9) -> Equivalence:
    """Compare the feasible set and optimum of the constraint route with the
    size-``z_tot`` independent sets of ``graph`` and ``solve_exact``."""
    from .solver import solve_exact

    C, U, B, Z = graph.shape
    spec = FeasibleSetSpec(graph.mode, C, B, Z, U, cap)
    w = graph.weights.reshape(graph.shape)
    ora = scan_feasible(spec, w)
    gra = scan_independent_sets(graph)
    sets_match = ora.count == gra.count and ora.digest == gra.digest
    exact = solve_exact(graph).schedule
    if ora.best is None or exact is None:
        opt_match = ora.best is None and exact is None and gra.best is None
    else:
        ref = ora.best.total_weight
        opt_match = (
            ora.best.associations == exact.associations
            and abs(exact.total_weight - ref) <= rel_tol * max(abs(ref), 1e-300)
            and gra.best is not None
            and gra.best.associations == ora.best.associations
        )
    return Equivalence(graph.mode, ora.count, gra.count, sets_match, opt_match)
