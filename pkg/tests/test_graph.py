import io
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import cransched as cs
from cransched.graph import (
    ALL_MODES,
    Association,
    ConflictGraph,
    CoordinationMode,
    are_conflicting,
    build_graph,
    enumerate_associations,
)
from cransched.network import NetworkConfig
from cransched.oracle import independent_sets, scan_independent_sets

H, S, X = CoordinationMode.HYBRID, CoordinationMode.SIGNAL, CoordinationMode.SCHEDULING


def delta(x):
    return 1 if x == 0 else 0


def reference_conflict(mode, a, b):
    """Edge rules written directly in delta form."""
    cc1 = delta(a.u - b.u) * (1 - delta(a.c - b.c)) == 1
    cc2 = (a.c, a.b, a.z) == (b.c, b.b, b.z)
    cc3 = delta(a.u - b.u) * delta(a.z - b.z) == 1
    bs = delta(a.u - b.u) * (1 - delta(a.b - b.b)) == 1
    return {H: cc1 or cc2 or cc3, S: cc2 or cc3, X: cc1 or cc2 or bs}[mode]


def uniform_graph(mode, C, B, Z, U, dense_limit=4096):
    cfg = NetworkConfig(C, B, Z, U)
    return build_graph(mode, np.ones(cfg.shape), cfg, dense_limit=dense_limit)


@pytest.mark.parametrize("dims,count", [((2, 2, 2, 4), 32), ((1, 1, 1, 1), 1), ((3, 3, 5, 24), 1080)])
def test_enumerate_associations(dims, count):
    C, B, Z, U = dims
    assoc = enumerate_associations(NetworkConfig(C, B, Z, U))
    assert len(assoc) == count == len(set(assoc))
    assert assoc == sorted(assoc)


def test_single_association():
    assert enumerate_associations(NetworkConfig(1, 1, 1, 1)) == [Association(0, 0, 0, 0)]


def test_conflict_examples():
    a = Association(0, 0, 0, 0)
    assert are_conflicting(H, a, Association(1, 0, 0, 0))  # same user, two clouds
    assert are_conflicting(H, a, Association(0, 1, 0, 0))  # same slot
    assert are_conflicting(S, a, Association(0, 1, 0, 0))
    assert not are_conflicting(H, a, Association(0, 0, 1, 1))
    assert are_conflicting(X, a, Association(0, 0, 1, 1))  # same user, another BS
    assert not are_conflicting(S, a, Association(1, 0, 0, 1))


def test_self_conflict_is_contract_violation():
    with pytest.raises(ValueError):
        are_conflicting(H, Association(0, 0, 0, 0), Association(0, 0, 0, 0))


def test_small_graph_edges():
    # vertices 0..3 = (0,0,0,0), (0,0,0,1), (0,1,0,0), (0,1,0,1); only the
    # shared-slot rule can fire, so edges are {0,2} and {1,3} in every mode
    for mode in ALL_MODES:
        g = uniform_graph(mode, 1, 1, 2, 2)
        assert g.n == 4
        assert sorted(g.edges()) == [(0, 2), (1, 3)]


@pytest.mark.parametrize("mode", ALL_MODES)
@pytest.mark.parametrize("dims", [(2, 2, 2, 4), (1, 3, 2, 3), (3, 1, 2, 2), (2, 3, 1, 5)])
def test_edges_match_reference_rules(mode, dims):
    C, B, Z, U = dims
    g = uniform_graph(mode, C, B, Z, U)
    verts = g.vertices
    expected = {(i, j) for i, j in itertools.combinations(range(g.n), 2)
                if reference_conflict(mode, verts[i], verts[j])}
    assert set(g.edges()) == expected
    for i, j in itertools.combinations(range(g.n), 2):
        assert are_conflicting(mode, verts[i], verts[j]) == ((i, j) in expected)


@pytest.mark.parametrize("mode", ALL_MODES)
def test_sparse_matches_dense(mode):
    dense = uniform_graph(mode, 2, 2, 3, 6)
    sparse = uniform_graph(mode, 2, 2, 3, 6, dense_limit=10)
    assert dense.is_dense and not sparse.is_dense
    np.testing.assert_array_equal(dense.csr[0], sparse.csr[0])
    np.testing.assert_array_equal(dense.csr[1], sparse.csr[1])
    for i, j in [(0, 1), (0, 12), (5, 29), (3, 3)]:
        assert dense.has_edge(i, j) == sparse.has_edge(i, j)


def test_large_network_graph_goes_sparse():
    g = uniform_graph(H, 3, 3, 5, 100)
    assert g.n == 4500 and not g.is_dense
    a, b = g.association(0), g.association(4499)
    assert g.has_edge(0, 4499) == are_conflicting(H, a, b)
    assert g.num_edges > 0


def test_adjacency_symmetric_irreflexive():
    for mode in ALL_MODES:
        g = uniform_graph(mode, 2, 2, 2, 4)
        adj = np.zeros((g.n, g.n), dtype=bool)
        for i, j in g.edges():
            adj[i, j] = adj[j, i] = True
        assert not adj.diagonal().any()
        for i in range(g.n):
            assert set(g.neighbors(i)) == set(np.flatnonzero(adj[i]))


def test_weights_copied_from_tensor():
    cfg = NetworkConfig(2, 2, 2, 3, rng_seed=4)
    t = cs.utility_tensor(cs.generate_instance(cfg))
    g = build_graph(H, t, cfg)
    for v, a in enumerate(g.vertices):
        assert g.weights[v] == t.value[a]
        assert g.vertex_index(a) == v
    assert g.z_tot == 8


def test_shape_mismatch():
    with pytest.raises(ValueError):
        build_graph(H, np.ones((2, 2, 2, 2)), NetworkConfig(2, 2, 2, 3))


@pytest.mark.parametrize("mode,count", [(H, 96), (S, 576), (X, 24)])
def test_small_independent_set_counts(mode, count):
    g = uniform_graph(mode, 2, 2, 2, 4)
    assert g.n == 32
    assert sum(1 for _ in independent_sets(g)) == count
    assert scan_independent_sets(g).count == count


def test_small_counts_combinatorics():
    # four users per z-layer permuted independently vs one user per BS
    assert math.factorial(4) ** 2 == 576
    assert 4 * math.factorial(4) == 96
    assert math.factorial(4) == 24


def test_small_family_one_is_independent():
    # (a, b, c, d) = (1, 2, 3, 4), labels cubz are 1-based
    labels = ["1111", "1112", "1221", "1222", "2311", "2312", "2421", "2422"]
    g = uniform_graph(H, 2, 2, 2, 4)
    ids = [g.vertex_index([int(ch) - 1 for ch in lab]) for lab in labels]
    assert frozenset(ids) in set(independent_sets(g))


def _pairs(g):
    return set(g.edges())


@settings(max_examples=40, deadline=None)
@given(C=st.integers(1, 3), B=st.integers(1, 3), Z=st.integers(1, 3), U=st.integers(1, 4))
def test_edge_nesting(C, B, Z, U):
    sig, hyb, sch = (_pairs(uniform_graph(m, C, B, Z, U)) for m in (S, H, X))
    assert sig <= hyb <= sch


@settings(max_examples=40, deadline=None)
@given(C=st.integers(1, 3), B=st.integers(1, 3), U=st.integers(1, 5))
def test_single_pz_collapses_modes(C, B, U):
    sig, hyb, sch = (_pairs(uniform_graph(m, C, B, 1, U)) for m in (S, H, X))
    assert sig == hyb == sch


assoc_st = st.builds(Association, st.integers(0, 2), st.integers(0, 3), st.integers(0, 2), st.integers(0, 2))


@settings(max_examples=200)
@given(a=assoc_st, b=assoc_st, mode=st.sampled_from(ALL_MODES))
def test_conflict_symmetry(a, b, mode):
    if a == b:
        return
    assert are_conflicting(mode, a, b) == are_conflicting(mode, b, a)
    assert are_conflicting(mode, a, b) == reference_conflict(mode, a, b)


def test_export_edgelist_format():
    cfg = NetworkConfig(1, 1, 2, 2)
    w = np.array([0.5, 0.25, 1.0, 2.0]).reshape(cfg.shape)
    g = build_graph(S, w, cfg)
    buf = io.StringIO()
    g.export_edgelist(buf)
    assert buf.getvalue().splitlines() == [
        "vertices 4 mode signal", "0 0.5", "1 0.25", "2 1", "3 2", "0 2", "1 3",
    ]
