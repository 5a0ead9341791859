"""Pure-Python kernels: the reference implementation of every hot loop.

The compiled module gcgt._kernels._fast mirrors these functions exactly
(same arguments, same return values, bit for bit).  Keep the two in sync;
tests/test_kernels.py cross-checks them on randomized inputs.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

IMPLEMENTATION = "pure-python"


def expansion_scan(
    adj_masks: Sequence[int], degrees: Sequence[int], max_size: int
) -> tuple[int, int, int]:
    """Scan all vertex sets A with 1 <= |A| <= max_size for min |boundary|/|A|.

    `adj_masks[v]` is the neighbor bitmask of vertex v.  Returns
    (boundary, size, vertex_mask) of the minimizing set; ties broken by
    smaller size, then smaller mask, so the result does not depend on
    enumeration order.
    """
    n = len(adj_masks)
    best_num, best_den, best_mask = -1, 1, 0

    def better(num: int, den: int, mask: int) -> bool:
        if best_num < 0:
            return True
        lhs, rhs = num * best_den, best_num * den
        if lhs != rhs:
            return lhs < rhs
        if den != best_den:
            return den < best_den
        return mask < best_mask

    # DFS over ascending-vertex extensions keeps the boundary update O(1)
    # per visited subset: adding v changes it by deg(v) - 2*|N(v) & A|.
    def rec(start: int, mask: int, size: int, bnd: int) -> None:
        nonlocal best_num, best_den, best_mask
        for v in range(start, n):
            inside = (adj_masks[v] & mask).bit_count()
            nb = bnd + degrees[v] - 2 * inside
            nm = mask | (1 << v)
            if better(nb, size + 1, nm):
                best_num, best_den, best_mask = nb, size + 1, nm
            if size + 1 < max_size:
                rec(v + 1, nm, size + 1, nb)

    rec(0, 0, 0, 0)
    return best_num, best_den, best_mask


def disjunct_witness(
    edge_masks: Sequence[int], d: int
) -> tuple[int, tuple[int, ...]] | None:
    """First (e, B) violating d-disjunctness, or None.

    `edge_masks[e]` holds the tests containing edge e, one bit per test.
    (e, B) violates when every test containing e also meets B, |B| <= d,
    e not in B.  Search order: smallest e, then smallest |B| (the empty B
    catches edges in no test), then lexicographic B, so the reported
    witness is reproducible and minimal in size.
    """
    m = len(edge_masks)
    for e in range(m):
        me = edge_masks[e]
        if me == 0:
            return e, ()
        if d == 0:
            continue
        # Only edges sharing a test with e can help cover it, and at the
        # minimal witness size every member must help, so restricting the
        # candidate pool keeps the found witness identical.
        cands = [b for b in range(m) if b != e and (edge_masks[b] & me)]
        nc = len(cands)
        suffix = [0] * (nc + 1)
        for i in range(nc - 1, -1, -1):
            suffix[i] = suffix[i + 1] | edge_masks[cands[i]]
        if me & ~suffix[0]:
            continue  # even the full pool cannot cover e

        for size in range(1, d + 1):
            combo = _first_cover(edge_masks, me, cands, suffix, size)
            if combo is not None:
                return e, combo
    return None


def _first_cover(
    edge_masks: Sequence[int],
    target: int,
    cands: list[int],
    suffix: list[int],
    size: int,
) -> tuple[int, ...] | None:
    """Lexicographically first size-`size` candidate combo covering target."""
    nc = len(cands)
    chosen: list[int] = []

    def rec(start: int, union: int, depth: int) -> tuple[int, ...] | None:
        remaining = size - depth
        for i in range(start, nc - remaining + 1):
            u2 = union | edge_masks[cands[i]]
            if remaining == 1:
                if target & ~u2 == 0:
                    return tuple(chosen) + (cands[i],)
                continue
            if target & ~(u2 | suffix[i + 1]):
                continue  # unreachable even with every later candidate
            chosen.append(cands[i])
            hit = rec(i + 1, u2, depth + 1)
            chosen.pop()
            if hit is not None:
                return hit
        return None

    return rec(0, 0, 0)


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def component_labels(
    n: int, eu: np.ndarray, ev: np.ndarray, survivors: np.ndarray
) -> np.ndarray:
    """Component labels (int32, contiguous, ordered by first vertex) of the
    subgraph keeping edge i iff survivors[i]."""
    uf = _UnionFind(n)
    m = len(eu)
    for i in range(m):
        if survivors[i]:
            uf.union(int(eu[i]), int(ev[i]))
    labels = np.empty(n, dtype=np.int32)
    mapping: dict[int, int] = {}
    for v in range(n):
        root = uf.find(v)
        if root not in mapping:
            mapping[root] = len(mapping)
        labels[v] = mapping[root]
    return labels


def component_size_at_edge(
    n: int, eu: np.ndarray, ev: np.ndarray, survivors: np.ndarray, eid: int
) -> np.ndarray:
    """Per trial: vertex count of the component containing edge `eid` in the
    subgraph of surviving edges, or 0 when `eid` itself did not survive.

    survivors has shape (trials, m).
    """
    trials = survivors.shape[0]
    m = len(eu)
    out = np.zeros(trials, dtype=np.int32)
    anchor = int(eu[eid])
    for t in range(trials):
        row = survivors[t]
        if not row[eid]:
            continue
        uf = _UnionFind(n)
        for i in range(m):
            if row[i]:
                uf.union(int(eu[i]), int(ev[i]))
        out[t] = uf.size[uf.find(anchor)]
    return out


def connected_trials(
    n: int, eu: np.ndarray, ev: np.ndarray, survivors: np.ndarray
) -> np.ndarray:
    """Per trial: does the surviving subgraph connect all n vertices?"""
    trials = survivors.shape[0]
    m = len(eu)
    out = np.zeros(trials, dtype=bool)
    for t in range(trials):
        row = survivors[t]
        uf = _UnionFind(n)
        for i in range(m):
            if row[i]:
                uf.union(int(eu[i]), int(ev[i]))
        out[t] = uf.size[uf.find(0)] == n
    return out


def walk_edges(
    indptr: np.ndarray,
    neighbors: np.ndarray,
    edge_ids: np.ndarray,
    start: int,
    steps: int,
    uniforms: np.ndarray,
) -> np.ndarray:
    """Distinct edge ids (ascending) touched by a `steps`-step random walk.

    The walk starts at `start`; step i moves to neighbor index
    floor(uniforms[i] * deg(v)) of the current vertex v.
    """
    seen: set[int] = set()
    v = start
    for i in range(steps):
        lo, hi = int(indptr[v]), int(indptr[v + 1])
        k = hi - lo
        j = int(uniforms[i] * k)
        if j >= k:  # guard against u*k rounding up to k
            j = k - 1
        seen.add(int(edge_ids[lo + j]))
        v = int(neighbors[lo + j])
    return np.array(sorted(seen), dtype=np.int32)
