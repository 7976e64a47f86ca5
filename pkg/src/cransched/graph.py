"""Association space and conflict graphs for the three coordination modes."""

from __future__ import annotations

from enum import Enum
from functools import cached_property
from typing import IO, Iterator, NamedTuple

import numpy as np

from .network import NetworkConfig, UtilityTensor

DENSE_LIMIT = 4096


class CoordinationMode(str, Enum):
    HYBRID = "hybrid"
    SIGNAL = "signal"
    SCHEDULING = "sched"

    @property
    def code(self) -> int:
        """Integer code understood by the search kernels."""
        return _MODE_CODES[self]


_MODE_CODES = {CoordinationMode.HYBRID: 0, CoordinationMode.SIGNAL: 1, CoordinationMode.SCHEDULING: 2}

ALL_MODES = (CoordinationMode.SIGNAL, CoordinationMode.HYBRID, CoordinationMode.SCHEDULING)


class Association(NamedTuple):
    """One (cloud, user, BS, PZ) scheduling decision.

    Tuple ordering gives the lexicographic ``(c, u, b, z)`` total order.
    """

    c: int
    u: int
    b: int
    z: int


# Edge rules. Each works elementwise on ints or numpy arrays.

def _user_across_clouds(c1, u1, c2, u2):
    return (u1 == u2) & (c1 != c2)


def _same_slot(c1, b1, z1, c2, b2, z2):
    return (c1 == c2) & (b1 == b2) & (z1 == z2)


def _user_same_pz(u1, z1, u2, z2):
    return (u1 == u2) & (z1 == z2)


def _user_across_bs(u1, b1, u2, b2):
    return (u1 == u2) & (b1 != b2)


def _conflict_mask(mode, c1, u1, b1, z1, c2, u2, b2, z2):
    slot = _same_slot(c1, b1, z1, c2, b2, z2)
    if mode is CoordinationMode.SIGNAL:
        return slot | _user_same_pz(u1, z1, u2, z2)
    if mode is CoordinationMode.HYBRID:
        return slot | _user_across_clouds(c1, u1, c2, u2) | _user_same_pz(u1, z1, u2, z2)
    if mode is CoordinationMode.SCHEDULING:
        return slot | _user_across_clouds(c1, u1, c2, u2) | _user_across_bs(u1, b1, u2, b2)
    raise ValueError(f"unknown coordination mode {mode!r}")


def are_conflicting(mode: CoordinationMode, a: Association, a2: Association) -> bool:
    """Whether associations ``a`` and ``a2`` may not appear in one schedule."""
    mode = CoordinationMode(mode)
    a, a2 = Association(*a), Association(*a2)
    if a == a2:
        raise ValueError("a vertex has no conflict relation with itself")
    return bool(_conflict_mask(mode, *a, *a2))


def enumerate_associations(config: NetworkConfig) -> list[Association]:
    C, U, B, Z = config.shape
    return [
        Association(c, u, b, z)
        for c in range(C)
        for u in range(U)
        for b in range(B)
        for z in range(Z)
    ]


class ConflictGraph:
    """Conflict graph over all C*U*B*Z associations.

    Vertex ``i`` is the i-th association in lexicographic order, which is
    also the flat index of ``(c, u, b, z)`` in a ``(C, U, B, Z)`` tensor.
    Adjacency is a dense boolean matrix up to ``DENSE_LIMIT`` vertices and
    sorted neighbour arrays beyond that.
    """

    def __init__(self, mode, shape, weights, adjacency):
        self.mode = CoordinationMode(mode)
        self.shape = tuple(int(x) for x in shape)
        self.weights = np.ascontiguousarray(weights, dtype=float)
        self.weights.setflags(write=False)
        self._adj = adjacency
        if isinstance(adjacency, np.ndarray):
            adjacency.setflags(write=False)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def z_tot(self) -> int:
        C, _, B, Z = self.shape
        return C * B * Z

    @property
    def is_dense(self) -> bool:
        return isinstance(self._adj, np.ndarray)

    @cached_property
    def vertices(self) -> list[Association]:
        C, U, B, Z = self.shape
        return [Association(*map(int, idx)) for idx in np.ndindex(C, U, B, Z)]

    def association(self, i: int) -> Association:
        return Association(*map(int, np.unravel_index(i, self.shape)))

    def vertex_index(self, a) -> int:
        return int(np.ravel_multi_index(tuple(a), self.shape))

    def has_edge(self, i: int, j: int) -> bool:
        if self.is_dense:
            return bool(self._adj[i, j])
        nb = self._adj[i]
        k = np.searchsorted(nb, j)
        return bool(k < nb.size and nb[k] == j)

    def neighbors(self, i: int) -> np.ndarray:
        if self.is_dense:
            return np.flatnonzero(self._adj[i])
        return self._adj[i]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with sorted neighbour lists."""
        if self.is_dense:
            rows, cols = np.nonzero(self._adj)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(rows, minlength=self.n), out=indptr[1:])
            return indptr, cols.astype(np.int64)
        lengths = np.fromiter((nb.size for nb in self._adj), dtype=np.int64, count=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        indices = np.concatenate(self._adj) if self.n else np.zeros(0, dtype=np.int64)
        return indptr, indices.astype(np.int64)

    @property
    def num_edges(self) -> int:
        return int(self.csr[1].size // 2)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(i, j)`` with ``i < j``, in ascending order."""
        indptr, indices = self.csr
        for i in range(self.n):
            for j in indices[indptr[i]:indptr[i + 1]]:
                if j > i:
                    yield i, int(j)

    def edge_array(self) -> np.ndarray:
        indptr, indices = self.csr
        rows = np.repeat(np.arange(self.n), np.diff(indptr))
        keep = indices > rows
        return np.stack([rows[keep], indices[keep]], axis=1)

    @cached_property
    def slot_vertices(self) -> np.ndarray:
        """``(C*B*Z, U)`` vertex ids; row ``(c*B + b)*Z + z`` lists that slot's
        vertices by user index."""
        C, U, B, Z = self.shape
        ids = np.arange(self.n).reshape(C, U, B, Z)
        return np.ascontiguousarray(ids.transpose(0, 2, 3, 1).reshape(C * B * Z, U))

    @cached_property
    def slot_order(self) -> np.ndarray:
        """Like :attr:`slot_vertices` but each row sorted by descending weight
        (ties by ascending vertex id)."""
        sv = self.slot_vertices
        w = self.weights[sv]
        idx = np.argsort(-w, axis=1, kind="stable")
        return np.ascontiguousarray(np.take_along_axis(sv, idx, axis=1))

    def export_edgelist(self, fh: IO[str]) -> None:
        """Write ``vertices N mode M``, then ``v w(v)`` per vertex, then
        ``i j`` per edge."""
        fh.write(f"vertices {self.n} mode {self.mode.value}\n")
        for v, w in enumerate(self.weights):
            fh.write(f"{v} {w:.17g}\n")
        for i, j in self.edge_array():
            fh.write(f"{i} {j}\n")


def _dense_adjacency(mode, shape):
    idx = [a.ravel() for a in np.indices(shape)]
    c, u, b, z = (x[:, None] for x in idx)
    c2, u2, b2, z2 = (x[None, :] for x in idx)
    adj = _conflict_mask(mode, c, u, b, z, c2, u2, b2, z2)
    np.fill_diagonal(adj, False)
    return adj


def _sparse_adjacency(mode, shape):
    # every rule requires a shared slot or a shared user, so only pairs
    # inside those groups are candidates
    C, U, B, Z = shape
    n = C * U * B * Z
    ids = np.arange(n).reshape(C, U, B, Z)
    groups = [ids[:, u].ravel() for u in range(U)]
    groups += [ids[c, :, b, z] for c in range(C) for b in range(B) for z in range(Z)]
    rows, cols = [], []
    for g in groups:
        ci, ui, bi, zi = np.unravel_index(g, shape)
        mask = _conflict_mask(
            mode,
            ci[:, None], ui[:, None], bi[:, None], zi[:, None],
            ci[None, :], ui[None, :], bi[None, :], zi[None, :],
        )
        np.fill_diagonal(mask, False)
        r, k = np.nonzero(mask)
        rows.append(g[r])
        cols.append(g[k])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    pairs = np.unique(rows * n + cols)
    rows, cols = np.divmod(pairs, n)
    split = np.searchsorted(rows, np.arange(1, n))
    return [a.astype(np.int64) for a in np.split(cols, split)]


def build_graph(mode, tensor: UtilityTensor, config: NetworkConfig,
                dense_limit: int = DENSE_LIMIT) -> ConflictGraph:
    """Conflict graph of ``mode`` weighted by the utility tensor."""
    mode = CoordinationMode(mode)
    value = tensor.value if isinstance(tensor, UtilityTensor) else np.asarray(tensor)
    if value.shape != config.shape:
        raise ValueError(f"utility tensor shape {value.shape} does not match config {config.shape}")
    n = int(np.prod(config.shape))
    if n <= dense_limit:
        adj = _dense_adjacency(mode, config.shape)
    else:
        adj = _sparse_adjacency(mode, config.shape)
    return ConflictGraph(mode, config.shape, value.ravel(), adj)
