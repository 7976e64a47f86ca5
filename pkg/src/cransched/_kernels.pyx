# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels.

Mirror of :mod:`cransched._pykernels`; see that module for the shared vertex,
slot and tie-breaking conventions. Inputs are converted to contiguous int64 /
float64 / uint64 arrays before entering the typed loops.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t, int32_t

cdef enum:
    MODE_HYBRID = 0
    MODE_SIGNAL = 1
    MODE_SCHED = 2


cdef inline uint64_t _mix64(uint64_t x) noexcept nogil:
    x ^= x >> 30
    x *= <uint64_t>0xBF58476D1CE4E5B9ULL
    x ^= x >> 27
    x *= <uint64_t>0x94D049BB133111EBULL
    x ^= x >> 31
    return x


def mix64(x):
    return int(_mix64(<uint64_t>(int(x) & 0xFFFFFFFFFFFFFFFF)))


cdef inline void _sort_ids(int64_t[::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef int64_t key
    for i in range(1, n):
        key = a[i]
        j = i - 1
        while j >= 0 and a[j] > key:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = key


cdef inline bint _lex_less(int64_t[::1] a, int64_t[::1] b, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


cdef class _Search:
    """Shared state: CSR adjacency, weights, per-slot candidate order."""
    cdef const int64_t[::1] indptr
    cdef const int64_t[::1] indices
    cdef const double[::1] w
    cdef const int64_t[:, ::1] order
    cdef int32_t[::1] blocked
    cdef int64_t[::1] chosen
    cdef int64_t[::1] scratch
    cdef int64_t[::1] best
    cdef Py_ssize_t S, U, n
    cdef double best_val, tol
    cdef bint have_best, first_only, done
    cdef int64_t nodes

    def __init__(self, indptr, indices, weights, order, double tol=0.0, bint first_only=False):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.w = np.ascontiguousarray(weights, dtype=np.float64)
        order = np.ascontiguousarray(order, dtype=np.int64)
        if order.ndim != 2:
            order = order.reshape(0, 0)
        self.order = order
        self.S = order.shape[0]
        self.U = order.shape[1]
        self.n = self.w.shape[0]
        self.blocked = np.zeros(self.n, dtype=np.int32)
        self.chosen = np.zeros(max(self.S, 1), dtype=np.int64)
        self.scratch = np.zeros(max(self.S, 1), dtype=np.int64)
        self.best = np.zeros(max(self.S, 1), dtype=np.int64)
        self.tol = tol
        self.first_only = first_only
        self.have_best = False
        self.done = False
        self.nodes = 0
        self.best_val = 0.0

    cdef inline void block(self, int64_t v, int32_t delta) noexcept nogil:
        cdef int64_t k
        for k in range(self.indptr[v], self.indptr[v + 1]):
            self.blocked[self.indices[k]] += delta

    cdef void leaf(self) noexcept nogil:
        cdef Py_ssize_t i
        cdef double val = 0.0
        for i in range(self.S):
            self.scratch[i] = self.chosen[i]
        _sort_ids(self.scratch, self.S)
        for i in range(self.S):
            val += self.w[self.scratch[i]]
        if (not self.have_best or val > self.best_val
                or (val == self.best_val and _lex_less(self.scratch, self.best, self.S))):
            self.best_val = val
            self.have_best = True
            for i in range(self.S):
                self.best[i] = self.scratch[i]

    cdef void dfs(self, Py_ssize_t d, double cur) noexcept nogil:
        cdef Py_ssize_t s, k
        cdef int64_t v
        cdef double bound
        cdef bint found
        self.nodes += 1
        if d == self.S:
            self.leaf()
            if self.first_only:
                self.done = True
            return
        bound = cur
        for s in range(d, self.S):
            found = False
            for k in range(self.U):
                v = self.order[s, k]
                if self.blocked[v] == 0:
                    bound += self.w[v]
                    found = True
                    break
            if not found:
                return
        if self.have_best and bound < self.best_val - self.tol:
            return
        for k in range(self.U):
            v = self.order[d, k]
            if self.blocked[v] != 0:
                continue
            self.block(v, 1)
            self.chosen[d] = v
            self.dfs(d + 1, cur + self.w[v])
            self.block(v, -1)
            if self.done:
                return

    def run(self):
        with nogil:
            self.dfs(0, 0.0)
        if not self.have_best:
            return np.zeros(0, dtype=np.int64), int(self.nodes)
        return np.asarray(self.best[:self.S]).copy(), int(self.nodes)


def bnb_search(indptr, indices, weights, order, double tol, bint first_only=False):
    return _Search(indptr, indices, weights, order, tol, first_only).run()


def greedy_assign(indptr, indices, weights, order):
    cdef _Search st = _Search(indptr, indices, weights, order)
    cdef Py_ssize_t S = st.S, U = st.U
    cdef int64_t[::1] assign = np.full(max(S, 1), -1, dtype=np.int64)
    cdef Py_ssize_t step, s, k, best_s
    cdef int64_t v, best_v
    cdef bint found, ok = True
    with nogil:
        for step in range(S):
            best_s = -1
            best_v = -1
            for s in range(S):
                if assign[s] >= 0:
                    continue
                found = False
                for k in range(U):
                    v = st.order[s, k]
                    if st.blocked[v] == 0:
                        found = True
                        break
                if not found:
                    ok = False
                    break
                if best_s < 0 or st.w[v] > st.w[best_v]:
                    best_s = s
                    best_v = v
            if not ok:
                break
            assign[best_s] = best_v
            st.block(best_v, 1)
    return np.asarray(assign[:S]).copy(), bool(ok)


def local_search(indptr, indices, weights, order, assign_in, Py_ssize_t passes):
    cdef _Search st = _Search(indptr, indices, weights, order)
    cdef Py_ssize_t S = st.S, U = st.U
    cdef int64_t[::1] assign = np.array(assign_in, dtype=np.int64).reshape(-1)
    cdef int64_t[::1] stamp = np.zeros(max(st.n, 1), dtype=np.int64)
    cdef int64_t token = 0, moves = 0
    cdef Py_ssize_t p, s1, s2, k1, k2
    cdef int64_t v1, v2, a, b, b1, b2, kk
    cdef double best, thresh, top2
    cdef bint improved
    for s1 in range(S):
        st.block(assign[s1], 1)
    with nogil:
        for p in range(passes):
            improved = False
            for s1 in range(S):
                for s2 in range(s1 + 1, S):
                    v1 = assign[s1]
                    v2 = assign[s2]
                    st.block(v1, -1)
                    st.block(v2, -1)
                    best = st.w[v1] + st.w[v2]
                    thresh = best + 1e-12 * (best if best >= 0 else -best)
                    b1 = v1
                    b2 = v2
                    top2 = st.w[st.order[s2, 0]]
                    for k1 in range(U):
                        a = st.order[s1, k1]
                        if st.blocked[a] != 0:
                            continue
                        if st.w[a] + top2 <= thresh:
                            break
                        token += 1
                        for kk in range(st.indptr[a], st.indptr[a + 1]):
                            stamp[st.indices[kk]] = token
                        for k2 in range(U):
                            b = st.order[s2, k2]
                            if st.blocked[b] != 0 or stamp[b] == token:
                                continue
                            if st.w[a] + st.w[b] > thresh:
                                thresh = st.w[a] + st.w[b]
                                b1 = a
                                b2 = b
                            break
                    st.block(b1, 1)
                    st.block(b2, 1)
                    if b1 != v1 or b2 != v2:
                        assign[s1] = b1
                        assign[s2] = b2
                        improved = True
                        moves += 1
            if not improved:
                break
    return np.asarray(assign).copy(), int(moves)


cdef class _Oracle:
    cdef Py_ssize_t C, B, Z, U, S, mode
    cdef const double[::1] w
    cdef const uint64_t[::1] keys
    cdef int64_t[::1] slot_base
    cdef int64_t[::1] slot_c
    cdef int64_t[::1] slot_b
    cdef int64_t[::1] slot_z
    cdef int32_t[::1] x_uz
    cdef int32_t[::1] x_cu
    cdef int32_t[::1] x_cub
    cdef int32_t[::1] n_cloud
    cdef int32_t[::1] n_bs
    cdef int64_t[::1] chosen
    cdef int64_t[::1] scratch
    cdef int64_t[::1] best
    cdef uint64_t count, digest
    cdef double best_val, tol
    cdef bint have_best

    def __init__(self, C, B, Z, U, mode, weights, keys, double tol):
        self.C, self.B, self.Z, self.U, self.mode = C, B, Z, U, mode
        self.S = C * B * Z
        self.w = np.ascontiguousarray(weights, dtype=np.float64)
        self.keys = np.ascontiguousarray(keys, dtype=np.uint64)
        cs, bs, zs = np.meshgrid(np.arange(C), np.arange(B), np.arange(Z), indexing="ij")
        cs, bs, zs = cs.ravel(), bs.ravel(), zs.ravel()
        self.slot_c = np.ascontiguousarray(cs, dtype=np.int64)
        self.slot_b = np.ascontiguousarray(bs, dtype=np.int64)
        self.slot_z = np.ascontiguousarray(zs, dtype=np.int64)
        self.slot_base = np.ascontiguousarray(((cs * U) * B + bs) * Z + zs, dtype=np.int64)
        self.x_uz = np.zeros(U * Z, dtype=np.int32)
        self.x_cu = np.zeros(C * U, dtype=np.int32)
        self.x_cub = np.zeros(C * U * B, dtype=np.int32)
        self.n_cloud = np.zeros(U, dtype=np.int32)
        self.n_bs = np.zeros(U, dtype=np.int32)
        self.chosen = np.zeros(max(self.S, 1), dtype=np.int64)
        self.scratch = np.zeros(max(self.S, 1), dtype=np.int64)
        self.best = np.zeros(max(self.S, 1), dtype=np.int64)
        self.count = 0
        self.digest = 0
        self.tol = tol
        self.have_best = False
        self.best_val = 0.0

    cdef inline bint admissible(self, Py_ssize_t c, Py_ssize_t u, Py_ssize_t b, Py_ssize_t z) noexcept nogil:
        # would the mode's constraints still hold after X[c,u,b,z] = 1?
        if self.mode != MODE_SCHED and self.x_uz[u * self.Z + z] >= 1:
            return False  # Y[u,z] <= 1
        if self.mode == MODE_HYBRID and self.x_cu[c * self.U + u] == 0 and self.n_cloud[u] >= 1:
            return False  # sum_c Z[c,u] <= 1
        if (self.mode == MODE_SCHED and self.x_cub[(c * self.U + u) * self.B + b] == 0
                and self.n_bs[u] >= 1):
            return False  # sum_cb Y[c,u,b] <= 1
        return True

    cdef inline void apply(self, Py_ssize_t c, Py_ssize_t u, Py_ssize_t b, Py_ssize_t z, int32_t delta) noexcept nogil:
        cdef Py_ssize_t icu = c * self.U + u
        cdef Py_ssize_t icub = icu * self.B + b
        if self.mode != MODE_SCHED:
            self.x_uz[u * self.Z + z] += delta
        if self.mode == MODE_HYBRID:
            if delta > 0 and self.x_cu[icu] == 0:
                self.n_cloud[u] += 1
            self.x_cu[icu] += delta
            if delta < 0 and self.x_cu[icu] == 0:
                self.n_cloud[u] -= 1
        elif self.mode == MODE_SCHED:
            if delta > 0 and self.x_cub[icub] == 0:
                self.n_bs[u] += 1
            self.x_cub[icub] += delta
            if delta < 0 and self.x_cub[icub] == 0:
                self.n_bs[u] -= 1

    cdef void leaf(self, double partial, uint64_t h) noexcept nogil:
        cdef Py_ssize_t i
        cdef double val = 0.0
        self.count += 1
        self.digest += _mix64(h)
        if self.have_best and partial < self.best_val - self.tol:
            return
        for i in range(self.S):
            self.scratch[i] = self.chosen[i]
        _sort_ids(self.scratch, self.S)
        for i in range(self.S):
            val += self.w[self.scratch[i]]
        if (not self.have_best or val > self.best_val
                or (val == self.best_val and _lex_less(self.scratch, self.best, self.S))):
            self.best_val = val
            self.have_best = True
            for i in range(self.S):
                self.best[i] = self.scratch[i]

    cdef void dfs(self, Py_ssize_t d, double partial, uint64_t h) noexcept nogil:
        cdef Py_ssize_t u, c, b, z
        cdef int64_t v
        if d == self.S:
            self.leaf(partial, h)
            return
        c = self.slot_c[d]
        b = self.slot_b[d]
        z = self.slot_z[d]
        for u in range(self.U):
            if not self.admissible(c, u, b, z):
                continue
            v = self.slot_base[d] + u * self.B * self.Z
            self.chosen[d] = v
            if d + 1 == self.S:
                self.leaf(partial + self.w[v], h ^ self.keys[v])
                continue
            self.apply(c, u, b, z, 1)
            self.dfs(d + 1, partial + self.w[v], h ^ self.keys[v])
            self.apply(c, u, b, z, -1)

    def run(self):
        with nogil:
            self.dfs(0, 0.0, 0)
        best = np.asarray(self.best[:self.S]).copy() if self.have_best else np.zeros(0, dtype=np.int64)
        return int(self.count), int(self.digest), best


def oracle_scan(C, B, Z, U, mode, weights, keys, double tol):
    return _Oracle(C, B, Z, U, mode, weights, keys, tol).run()


cdef class _GraphScan:
    cdef const int64_t[::1] indptr
    cdef const int64_t[::1] indices
    cdef const double[::1] w
    cdef const uint64_t[::1] keys
    cdef int32_t[::1] blocked
    cdef int64_t[::1] chosen
    cdef int64_t[::1] best
    cdef Py_ssize_t n, k
    cdef uint64_t count, digest
    cdef double best_val
    cdef bint have_best

    def __init__(self, indptr, indices, k, weights, keys):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.w = np.ascontiguousarray(weights, dtype=np.float64)
        self.keys = np.ascontiguousarray(keys, dtype=np.uint64)
        self.n = self.w.shape[0]
        self.k = k
        self.blocked = np.zeros(max(self.n, 1), dtype=np.int32)
        self.chosen = np.zeros(max(k, 1), dtype=np.int64)
        self.best = np.zeros(max(k, 1), dtype=np.int64)
        self.count = 0
        self.digest = 0
        self.best_val = 0.0
        self.have_best = False

    cdef inline void block(self, int64_t v, int32_t delta) noexcept nogil:
        cdef int64_t j
        for j in range(self.indptr[v], self.indptr[v + 1]):
            self.blocked[self.indices[j]] += delta

    cdef void dfs(self, Py_ssize_t start, Py_ssize_t depth, uint64_t h, double cur) noexcept nogil:
        cdef Py_ssize_t v, i
        if depth == self.k:
            self.count += 1
            self.digest += _mix64(h)
            if not self.have_best or cur > self.best_val:
                self.best_val = cur
                self.have_best = True
                for i in range(self.k):
                    self.best[i] = self.chosen[i]
            return
        for v in range(start, self.n - (self.k - depth) + 1):
            if self.blocked[v] != 0:
                continue
            self.block(v, 1)
            self.chosen[depth] = v
            self.dfs(v + 1, depth + 1, h ^ self.keys[v], cur + self.w[v])
            self.block(v, -1)

    def run(self):
        with nogil:
            self.dfs(0, 0, 0, 0.0)
        best = np.asarray(self.best[:self.k]).copy() if self.have_best else np.zeros(0, dtype=np.int64)
        return int(self.count), int(self.digest), best


def graph_scan(indptr, indices, k, weights, keys):
    return _GraphScan(indptr, indices, k, weights, keys).run()
