"""Pure-Python search kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the compiled kernels are checked against. Every function here has
an identically named, identically behaving counterpart in ``_kernels.pyx``.

Conventions shared by both backends
-----------------------------------
* Vertices are numbered by the flat C-order index of ``(c, u, b, z)`` in a
  ``(C, U, B, Z)`` tensor.
* Slots are numbered ``s = (c * B + b) * Z + z``.
* ``order`` is an ``(S, U)`` array listing each slot's vertices by
  descending weight (ties: ascending vertex id).
* A set's canonical value is the left-to-right float sum of its weights in
  ascending vertex order; ties in value go to the lexicographically smaller
  sorted vertex list.
"""

import numpy as np

MODE_HYBRID = 0
MODE_SIGNAL = 1
MODE_SCHED = 2

_MASK64 = (1 << 64) - 1


def mix64(x):
    """splitmix64 finalizer on a Python int."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def _neighbor_lists(indptr, indices):
    indptr = [int(i) for i in indptr]
    indices = [int(i) for i in indices]
    return [indices[indptr[v]:indptr[v + 1]] for v in range(len(indptr) - 1)]


def _canonical(ids, w):
    ids = sorted(ids)
    total = 0.0
    for v in ids:
        total += w[v]
    return total, ids


def _improves(val, ids, best_val, best_ids):
    if best_ids is None or val > best_val:
        return True
    return val == best_val and ids < best_ids


def bnb_search(indptr, indices, weights, order, tol, first_only=False):
    """Slot-wise branch and bound for the heaviest one-vertex-per-slot
    independent set.

    Returns ``(best, nodes)`` where ``best`` is the sorted vertex array
    (empty when no independent transversal exists).
    """
    nbrs = _neighbor_lists(indptr, indices)
    w = [float(x) for x in weights]
    order = [[int(v) for v in row] for row in np.asarray(order)]
    S = len(order)
    blocked = [0] * len(w)
    chosen = [0] * S
    state = {"val": 0.0, "ids": None, "nodes": 0, "done": False}

    def dfs(d, cur):
        state["nodes"] += 1
        if d == S:
            val, ids = _canonical(chosen, w)
            if _improves(val, ids, state["val"], state["ids"]):
                state["val"], state["ids"] = val, ids
            if first_only:
                state["done"] = True
            return
        bound = cur
        for s in range(d, S):
            for v in order[s]:
                if not blocked[v]:
                    bound += w[v]
                    break
            else:
                return
        if state["ids"] is not None and bound < state["val"] - tol:
            return
        for v in order[d]:
            if blocked[v]:
                continue
            for x in nbrs[v]:
                blocked[x] += 1
            chosen[d] = v
            dfs(d + 1, cur + w[v])
            for x in nbrs[v]:
                blocked[x] -= 1
            if state["done"]:
                return

    dfs(0, 0.0)
    best = state["ids"] if state["ids"] is not None else []
    return np.asarray(best, dtype=np.int64), state["nodes"]


def greedy_assign(indptr, indices, weights, order):
    """Fill slots one at a time, always taking the slot whose best compatible
    vertex is heaviest. Returns ``(assign, ok)``; ``assign[s]`` is -1 for
    slots left empty when the greedy dead-ends."""
    nbrs = _neighbor_lists(indptr, indices)
    w = [float(x) for x in weights]
    order = [[int(v) for v in row] for row in np.asarray(order)]
    S = len(order)
    blocked = [0] * len(w)
    assign = [-1] * S
    for _ in range(S):
        best_s, best_v = -1, -1
        for s in range(S):
            if assign[s] >= 0:
                continue
            for v in order[s]:
                if not blocked[v]:
                    break
            else:
                return np.asarray(assign, dtype=np.int64), False
            if best_s < 0 or w[v] > w[best_v]:
                best_s, best_v = s, v
        assign[best_s] = best_v
        for x in nbrs[best_v]:
            blocked[x] += 1
    return np.asarray(assign, dtype=np.int64), True


def local_search(indptr, indices, weights, order, assign, passes):
    """Pairwise slot re-assignment: for every slot pair, jointly pick the
    heaviest compatible pair of vertices. Returns ``(assign, moves)``."""
    nbrs = _neighbor_lists(indptr, indices)
    w = [float(x) for x in weights]
    order = [[int(v) for v in row] for row in np.asarray(order)]
    S = len(order)
    assign = [int(v) for v in assign]
    blocked = [0] * len(w)
    for v in assign:
        for x in nbrs[v]:
            blocked[x] += 1
    stamp = [0] * len(w)
    token = 0
    moves = 0
    for _ in range(passes):
        improved = False
        for s1 in range(S):
            for s2 in range(s1 + 1, S):
                v1, v2 = assign[s1], assign[s2]
                for x in nbrs[v1]:
                    blocked[x] -= 1
                for x in nbrs[v2]:
                    blocked[x] -= 1
                best = w[v1] + w[v2]
                thresh = best + 1e-12 * abs(best)
                b1, b2 = v1, v2
                top2 = w[order[s2][0]]
                for a in order[s1]:
                    if blocked[a]:
                        continue
                    if w[a] + top2 <= thresh:
                        break
                    token += 1
                    for x in nbrs[a]:
                        stamp[x] = token
                    for b in order[s2]:
                        if blocked[b] or stamp[b] == token:
                            continue
                        if w[a] + w[b] > thresh:
                            thresh = w[a] + w[b]
                            b1, b2 = a, b
                        break
                for x in nbrs[b1]:
                    blocked[x] += 1
                for x in nbrs[b2]:
                    blocked[x] += 1
                if b1 != v1 or b2 != v2:
                    assign[s1], assign[s2] = b1, b2
                    improved = True
                    moves += 1
        if not improved:
            break
    return np.asarray(assign, dtype=np.int64), moves


def iter_feasible_assignments(C, B, Z, U, mode):
    """Yield every feasible schedule as a per-slot user tuple.

    Slots are filled in ``(c, b, z)`` order with exactly one user each; a
    user is admitted only if the mode's indicator constraints still hold
    afterwards:

    * every mode except scheduling level: ``Y[u, z] = sum_cb X[c,u,b,z] <= 1``
    * hybrid: ``Zc[c, u] = 1 - delta(sum_bz X[c,u,b,z])`` and
      ``sum_c Zc[c, u] <= 1``
    * scheduling level: ``Yb[c,u,b] = min(sum_z X[c,u,b,z], 1)`` and
      ``sum_cb Yb[c,u,b] <= 1``
    """
    S = C * B * Z
    slots = [(c, b, z) for c in range(C) for b in range(B) for z in range(Z)]
    x_uz = [[0] * Z for _ in range(U)]
    x_cu = [[0] * U for _ in range(C)]
    x_cub = [[[0] * B for _ in range(U)] for _ in range(C)]
    users = [0] * S

    def admissible(u, c, b, z):
        if mode != MODE_SCHED and x_uz[u][z] > 1:
            return False
        if mode == MODE_HYBRID:
            if sum(1 for cc in range(C) if x_cu[cc][u] > 0) > 1:
                return False
        if mode == MODE_SCHED:
            n_bs = sum(1 for cc in range(C) for bb in range(B) if x_cub[cc][u][bb] > 0)
            if n_bs > 1:
                return False
        return True

    def rec(d):
        if d == S:
            yield tuple(users)
            return
        c, b, z = slots[d]
        for u in range(U):
            x_uz[u][z] += 1
            x_cu[c][u] += 1
            x_cub[c][u][b] += 1
            if admissible(u, c, b, z):
                users[d] = u
                yield from rec(d + 1)
            x_uz[u][z] -= 1
            x_cu[c][u] -= 1
            x_cub[c][u][b] -= 1

    yield from rec(0)


def oracle_scan(C, B, Z, U, mode, weights, keys, tol):
    """Count, fingerprint and maximize over the feasible-schedule set.

    Returns ``(count, digest, best)``. ``digest`` is the wrapping 64-bit sum
    of ``mix64(xor of member keys)`` over all schedules.
    """
    w = [float(x) for x in weights]
    keys = [int(k) for k in keys]
    slot_base = [((c * U) * B + b) * Z + z
                 for c in range(C) for b in range(B) for z in range(Z)]
    stride_u = B * Z
    count = 0
    digest = 0
    best_val, best_ids = 0.0, None
    for users in iter_feasible_assignments(C, B, Z, U, mode):
        ids = [base + u * stride_u for base, u in zip(slot_base, users)]
        h = 0
        partial = 0.0
        for v in ids:
            h ^= keys[v]
            partial += w[v]
        count += 1
        digest = (digest + mix64(h)) & _MASK64
        if best_ids is not None and partial < best_val - tol:
            continue
        val, ids = _canonical(ids, w)
        if _improves(val, ids, best_val, best_ids):
            best_val, best_ids = val, ids
    best = best_ids if best_ids is not None else []
    return count, digest, np.asarray(best, dtype=np.int64)


def graph_scan(indptr, indices, k, weights, keys):
    """Enumerate every independent set of exactly ``k`` vertices.

    Returns ``(count, digest, best)`` with the same digest and tie rules as
    :func:`oracle_scan`.
    """
    nbrs = _neighbor_lists(indptr, indices)
    n = len(nbrs)
    masks = [0] * n
    for v in range(n):
        for x in nbrs[v]:
            masks[v] |= 1 << x
    w = [float(x) for x in weights]
    keys = [int(kk) for kk in keys]
    state = {"count": 0, "digest": 0, "val": 0.0, "ids": None}
    chosen = []

    def dfs(start, blocked, h, cur):
        depth = len(chosen)
        if depth == k:
            state["count"] += 1
            state["digest"] = (state["digest"] + mix64(h)) & _MASK64
            # ascending enumeration: first of equal value is lexicographically smallest
            if state["ids"] is None or cur > state["val"]:
                state["val"], state["ids"] = cur, list(chosen)
            return
        for v in range(start, n - (k - depth) + 1):
            if blocked >> v & 1:
                continue
            chosen.append(v)
            dfs(v + 1, blocked | masks[v], h ^ keys[v], cur + w[v])
            chosen.pop()

    if k == 0:
        return 1, mix64(0), np.zeros(0, dtype=np.int64)
    dfs(0, 0, 0, 0.0)
    best = state["ids"] if state["ids"] is not None else []
    return state["count"], state["digest"], np.asarray(best, dtype=np.int64)
