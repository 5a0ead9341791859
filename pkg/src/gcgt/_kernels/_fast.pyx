# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels.  Mirrors gcgt._kernels._slow bit for bit.

Any behavioral change here must land in _slow.py as well;
tests/test_kernels.py enforces agreement on randomized inputs.
"""

import numpy as np

IMPLEMENTATION = "cython"

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def expansion_scan(adj_masks, degrees, int max_size):
    """See _slow.expansion_scan.  Requires n <= 24 (one-word masks)."""
    cdef int n = len(adj_masks)
    if n > 24:
        raise ValueError("compiled expansion_scan supports n <= 24")
    cdef u64[24] adj
    cdef long[24] deg
    cdef int i
    for i in range(n):
        adj[i] = adj_masks[i]
        deg[i] = degrees[i]

    # Gray-code sweep over all subsets with an O(1) boundary update per
    # step.  The (ratio, size, mask) selection key makes the result
    # independent of enumeration order, so this may differ from the DFS
    # order used by the pure kernel.
    cdef u64 total = (<u64>1) << n
    cdef u64 g = 1, bit, mask = 0
    cdef u64 best_mask = 0
    cdef long best_num = -1, best_den = 1
    cdef long size = 0, bnd = 0, inside
    cdef int v
    cdef bint take
    while g < total:
        v = __builtin_ctzll(g)
        bit = (<u64>1) << v
        if mask & bit:
            mask ^= bit
            inside = __builtin_popcountll(adj[v] & mask)
            bnd -= deg[v] - 2 * inside
            size -= 1
        else:
            inside = __builtin_popcountll(adj[v] & mask)
            bnd += deg[v] - 2 * inside
            mask |= bit
            size += 1
        if 1 <= size <= max_size:
            if best_num < 0:
                take = True
            elif bnd * best_den != best_num * size:
                take = bnd * best_den < best_num * size
            elif size != best_den:
                take = size < best_den
            else:
                take = mask < best_mask
            if take:
                best_num = bnd
                best_den = size
                best_mask = mask
        g += 1
    return int(best_num), int(best_den), int(best_mask)


cdef inline bint _covers(u64[:, ::1] words, int target, u64* u, int W) noexcept nogil:
    cdef int w
    for w in range(W):
        if words[target, w] & ~u[w]:
            return False
    return True


def disjunct_witness(edge_masks, int d):
    """See _slow.disjunct_witness."""
    cdef int m = len(edge_masks)
    cdef int W = 1
    cdef int e, w, i, b
    for e in range(m):
        b = (int(edge_masks[e]).bit_length() + 63) // 64
        if b > W:
            W = b
    words_arr = np.zeros((m, W), dtype=np.uint64)
    cdef u64[:, ::1] words = words_arr
    mask_limit = (1 << 64) - 1
    for e in range(m):
        v = int(edge_masks[e])
        w = 0
        while v:
            words[e, w] = v & mask_limit
            v >>= 64
            w += 1

    cands_arr = np.zeros(m, dtype=np.int32)
    cdef int[::1] cands = cands_arr.view(np.int32)
    suffix_arr = np.zeros((m + 1, W), dtype=np.uint64)
    cdef u64[:, ::1] suffix = suffix_arr
    # per-depth running unions and chosen candidate indices
    union_arr = np.zeros((d + 2, W), dtype=np.uint64)
    cdef u64[:, ::1] union_ = union_arr
    tmp_arr = np.zeros(W, dtype=np.uint64)
    cdef u64[::1] tmp = tmp_arr
    idx_arr = np.zeros(d + 1, dtype=np.int32)
    cdef int[::1] idx = idx_arr.view(np.int32)

    cdef int nc, size, t, ci
    cdef bint empty, ok
    for e in range(m):
        empty = True
        for w in range(W):
            if words[e, w]:
                empty = False
                break
        if empty:
            return e, ()
        if d == 0:
            continue
        nc = 0
        for b in range(m):
            if b == e:
                continue
            ok = False
            for w in range(W):
                if words[b, w] & words[e, w]:
                    ok = True
                    break
            if ok:
                cands[nc] = b
                nc += 1
        for w in range(W):
            suffix[nc, w] = 0
        for i in range(nc - 1, -1, -1):
            for w in range(W):
                suffix[i, w] = suffix[i + 1, w] | words[cands[i], w]
        if not _covers(words, e, &suffix[0, 0], W):
            continue

        for size in range(1, d + 1):
            # iterative lexicographic combination search
            t = 0
            i = 0
            for w in range(W):
                union_[0, w] = 0
            while True:
                if i > nc - (size - t):
                    if t == 0:
                        break
                    t -= 1
                    i = idx[t] + 1
                    continue
                ci = cands[i]
                for w in range(W):
                    union_[t + 1, w] = union_[t, w] | words[ci, w]
                if t == size - 1:
                    if _covers(words, e, &union_[t + 1, 0], W):
                        idx[t] = i
                        return e, tuple(int(cands[idx[k]]) for k in range(size))
                    i += 1
                    continue
                for w in range(W):
                    tmp[w] = union_[t + 1, w] | suffix[i + 1, w]
                if not _covers(words, e, &tmp[0], W):
                    i += 1
                    continue
                idx[t] = i
                t += 1
                i = idx[t - 1] + 1
    return None


cdef inline int _find(int* parent, int x) noexcept nogil:
    cdef int root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef inline void _union(int* parent, int* size, int a, int b) noexcept nogil:
    cdef int ra = _find(parent, a), rb = _find(parent, b), t
    if ra == rb:
        return
    if size[ra] < size[rb]:
        t = ra
        ra = rb
        rb = t
    parent[rb] = ra
    size[ra] += size[rb]


def component_labels(int n, eu, ev, survivors):
    """See _slow.component_labels."""
    cdef int[::1] u = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int[::1] v = np.ascontiguousarray(ev, dtype=np.int32)
    cdef const unsigned char[::1] s = np.ascontiguousarray(survivors, dtype=np.uint8)
    cdef int m = u.shape[0]
    parent_arr = np.arange(n, dtype=np.int32)
    size_arr = np.ones(n, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int[::1] size = size_arr
    labels_arr = np.empty(n, dtype=np.int32)
    mapping_arr = np.full(n, -1, dtype=np.int32)
    cdef int[::1] labels = labels_arr
    cdef int[::1] mapping = mapping_arr
    cdef int i, root, nlab = 0
    with nogil:
        for i in range(m):
            if s[i]:
                _union(&parent[0], &size[0], u[i], v[i])
        for i in range(n):
            root = _find(&parent[0], i)
            if mapping[root] < 0:
                mapping[root] = nlab
                nlab += 1
            labels[i] = mapping[root]
    return labels_arr


def component_size_at_edge(int n, eu, ev, survivors, int eid):
    """See _slow.component_size_at_edge."""
    cdef int[::1] u = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int[::1] v = np.ascontiguousarray(ev, dtype=np.int32)
    surv = np.ascontiguousarray(survivors, dtype=np.uint8)
    cdef const unsigned char[:, ::1] s = surv
    cdef int trials = s.shape[0]
    cdef int m = u.shape[0]
    out_arr = np.zeros(trials, dtype=np.int32)
    cdef int[::1] out = out_arr
    parent_arr = np.empty(n, dtype=np.int32)
    size_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int[::1] size = size_arr
    cdef int t, i, anchor = u[eid]
    with nogil:
        for t in range(trials):
            if not s[t, eid]:
                continue
            for i in range(n):
                parent[i] = i
                size[i] = 1
            for i in range(m):
                if s[t, i]:
                    _union(&parent[0], &size[0], u[i], v[i])
            out[t] = size[_find(&parent[0], anchor)]
    return out_arr


def connected_trials(int n, eu, ev, survivors):
    """See _slow.connected_trials."""
    cdef int[::1] u = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int[::1] v = np.ascontiguousarray(ev, dtype=np.int32)
    surv = np.ascontiguousarray(survivors, dtype=np.uint8)
    cdef const unsigned char[:, ::1] s = surv
    cdef int trials = s.shape[0]
    cdef int m = u.shape[0]
    out_arr = np.zeros(trials, dtype=bool)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    parent_arr = np.empty(n, dtype=np.int32)
    size_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int[::1] size = size_arr
    cdef int t, i
    with nogil:
        for t in range(trials):
            for i in range(n):
                parent[i] = i
                size[i] = 1
            for i in range(m):
                if s[t, i]:
                    _union(&parent[0], &size[0], u[i], v[i])
            out[t] = size[_find(&parent[0], 0)] == n
    return out_arr


def walk_edges(indptr, neighbors, edge_ids, int start, int steps, uniforms):
    """See _slow.walk_edges."""
    cdef int[::1] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef int[::1] nb = np.ascontiguousarray(neighbors, dtype=np.int32)
    cdef int[::1] ei = np.ascontiguousarray(edge_ids, dtype=np.int32)
    cdef double[::1] us = np.ascontiguousarray(uniforms, dtype=np.float64)
    seen_arr = np.zeros(len(edge_ids), dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    cdef int v = start, i, lo, k, j, count = 0
    with nogil:
        for i in range(steps):
            lo = ip[v]
            k = ip[v + 1] - lo
            j = <int>(us[i] * k)
            if j >= k:
                j = k - 1
            if not seen[ei[lo + j]]:
                seen[ei[lo + j]] = 1
                count += 1
            v = nb[lo + j]
    out = np.nonzero(seen_arr)[0].astype(np.int32)
    return out
