"""Graphs, generators, sparsification, cuts, and edge-expansion certificates.

Edges are the group-testing universe: every edge of a Graph has a stable
integer id equal to its position in the edge list, and every downstream
artifact (tests, defective sets, decoders) speaks in those ids.

Graph values are immutable after construction and safe to share across
worker processes; all randomness enters through explicit seeds (see
gcgt.randomness for the generator family and sub-seed rule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import GraphFormatError, ParameterError, RejectionExhaustedError
from .randomness import derive_seed, make_rng

__all__ = [
    "BitSet",
    "Graph",
    "ComponentLabeling",
    "ExpansionCertificate",
    "generate",
    "complete",
    "hypercube",
    "random_regular",
    "erdos_renyi",
    "barbell",
    "fat_tree",
    "boundary",
    "edge_endpoints_cover",
    "sparsify",
    "sparsify_mask",
    "connected_components",
    "min_cut",
    "certify_expansion",
    "spectral_expansion_bounds",
    "read_graph",
    "write_graph",
]


class BitSet:
    """Immutable fixed-capacity set of small non-negative integers.

    Used for vertex sets (capacity n) and edge sets (capacity m); the
    capacity pins the set to its owning graph.
    """

    __slots__ = ("capacity", "bits")

    def __init__(self, capacity: int, members: Iterable[int] = ()):
        bits = 0
        for x in members:
            if not 0 <= x < capacity:
                raise ParameterError(f"member {x} outside [0, {capacity})")
            bits |= 1 << x
        object.__setattr__(self, "capacity", capacity)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_mask(cls, capacity: int, mask: int) -> "BitSet":
        if mask < 0 or mask >> capacity:
            raise ParameterError("mask has bits outside the capacity")
        s = cls.__new__(cls)
        object.__setattr__(s, "capacity", capacity)
        object.__setattr__(s, "bits", mask)
        return s

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("BitSet is immutable")

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.capacity and bool(self.bits >> x & 1)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitSet)
            and self.capacity == other.capacity
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.capacity, self.bits))

    def __repr__(self) -> str:
        return f"BitSet({self.capacity}, {sorted(self)})"

    def to_set(self) -> set[int]:
        return set(self)

    def complement(self) -> "BitSet":
        full = (1 << self.capacity) - 1
        return BitSet.from_mask(self.capacity, full ^ self.bits)


def _as_vertex_mask(g: "Graph", vertices: "BitSet | Iterable[int]") -> int:
    if isinstance(vertices, BitSet):
        if vertices.capacity != g.n:
            raise ParameterError(
                f"vertex set capacity {vertices.capacity} != n={g.n}"
            )
        return vertices.bits
    return BitSet(g.n, vertices).bits


class Graph:
    """Undirected simple graph with id-stable edges.

    `edges[i]` is the pair (u, v) with u < v of edge id i.  No self loops,
    no duplicates.  Sparsified graphs carry `parent_edges`, mapping their
    edge ids back to the originating graph's ids.
    """

    __slots__ = ("n", "edges", "adjacency", "parent_edges", "_edge_index")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        parent_edges: tuple[int, ...] | None = None,
    ):
        if n < 0:
            raise ParameterError("vertex count must be non-negative")
        normalized: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u},{v}) outside vertex range")
            if u == v:
                raise ParameterError(f"self loop at vertex {u}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ParameterError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            normalized.append((u, v))
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(normalized):
            adjacency[u].append((v, eid))
            adjacency[v].append((u, eid))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adjacency))
        object.__setattr__(self, "parent_edges", parent_edges)
        object.__setattr__(self, "_edge_index", {e: i for i, e in enumerate(normalized)})

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("Graph is immutable")

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        try:
            return self._edge_index[(u, v)]
        except KeyError:
            raise ParameterError(f"no edge ({u},{v})") from None

    def regular_degree(self) -> int | None:
        """The common degree if the graph is regular, else None."""
        degs = set(self.degrees())
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_connected(self) -> bool:
        return connected_components(self).count <= 1

    def is_bipartite(self) -> bool:
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                v = stack.pop()
                for w, _ in self.adjacency[v]:
                    if color[w] < 0:
                        color[w] = color[v] ^ 1
                        stack.append(w)
                    elif color[w] == color[v]:
                        return False
        return True

    def adjacency_masks(self) -> list[int]:
        """Per-vertex neighbor bitmasks (for the subset-scan kernels)."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def edge_endpoint_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as parallel int32 arrays (for the census kernels)."""
        if self.m == 0:
            return np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int32)
        arr = np.asarray(self.edges, dtype=np.int32)
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])

    def csr_adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, neighbors, edge_ids) in per-vertex insertion order."""
        indptr = np.zeros(self.n + 1, dtype=np.int32)
        for v in range(self.n):
            indptr[v + 1] = indptr[v] + len(self.adjacency[v])
        neighbors = np.zeros(max(int(indptr[-1]), 1), dtype=np.int32)
        edge_ids = np.zeros_like(neighbors)
        pos = 0
        for v in range(self.n):
            for w, eid in self.adjacency[v]:
                neighbors[pos] = w
                edge_ids[pos] = eid
                pos += 1
        return indptr, neighbors[:pos], edge_ids[:pos]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class ComponentLabeling:
    """Connected components: per-vertex label, per-label size, label count.

    Labels are contiguous 0..count-1 in order of each component's smallest
    vertex, so the labeling is canonical for a given graph.
    """

    labels: tuple[int, ...]
    sizes: tuple[int, ...]
    count: int

    def component_of(self, v: int) -> int:
        return self.labels[v]

    def vertices_of(self, label: int) -> list[int]:
        return [v for v, lab in enumerate(self.labels) if lab == label]


@dataclass(frozen=True)
class ExpansionCertificate:
    """Edge-expansion certificate: alpha = min |boundary(A)|/|A| over
    nonempty A with |A| <= beta*n.

    Exact certificates carry a minimizing witness and use rational
    arithmetic throughout; heuristic ones (n > 24) only upper-bound the
    true alpha from sampled subsets.
    """

    beta: Fraction
    alpha: Fraction
    witness: BitSet | None
    exact: bool


# ---------------------------------------------------------------------------
# generators


def complete(n: int) -> Graph:
    """Complete graph K_n, edges in lexicographic order."""
    if n < 2:
        raise ParameterError("complete graph needs n >= 2")
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def hypercube(dim: int) -> Graph:
    """dim-dimensional hypercube on 2**dim vertices (binary labels)."""
    if dim < 1:
        raise ParameterError("hypercube needs dim >= 1")
    n = 1 << dim
    edges = [
        (u, u ^ (1 << b))
        for u in range(n)
        for b in range(dim)
        if u < u ^ (1 << b)
    ]
    return Graph(n, edges)


def random_regular(n: int, deg: int, seed: int, max_restarts: int = 10_000) -> Graph:
    """Uniform random simple deg-regular graph via the pairing model.

    Pairs n*deg stubs by a seeded shuffle and restarts from scratch on any
    self loop or duplicate edge, which keeps the distribution exactly
    uniform conditioned on success.  Raises RejectionExhaustedError after
    `max_restarts` failed attempts (the success rate decays like
    exp(-(deg**2 - 1)/4), so large degrees are out of reach by design).
    """
    if deg < 0 or deg >= n:
        raise ParameterError("need 0 <= deg < n")
    if (n * deg) % 2 != 0:
        raise ParameterError("n*deg must be even")
    rng = make_rng(seed)
    stubs_base = np.repeat(np.arange(n), deg)
    for _ in range(max_restarts):
        stubs = rng.permutation(stubs_base)
        edges: set[tuple[int, int]] = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            if u == v:
                ok = False
                break
            if u > v:
                u, v = v, u
            if (u, v) in edges:
                ok = False
                break
            edges.add((u, v))
        if ok:
            return Graph(n, sorted(edges))
    raise RejectionExhaustedError(
        f"pairing model failed {max_restarts} times for n={n}, deg={deg}"
    )


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each potential edge kept independently with probability p.

    Draws one uniform per vertex pair in lexicographic order, so equal
    seeds give identical graphs.
    """
    if n < 1:
        raise ParameterError("need n >= 1")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if not pairs:
        return Graph(n, [])
    us = make_rng(seed).random(len(pairs))
    return Graph(n, [e for e, u in zip(pairs, us) if u < p])


def barbell(half: int) -> Graph:
    """Two complete graphs K_half joined by a single bridge edge.

    Vertices 0..half-1 form the left clique, half..2*half-1 the right;
    the bridge joins half-1 to half and is the last edge id.
    """
    if half < 2:
        raise ParameterError("barbell needs half >= 2")
    edges = [(u, v) for u in range(half) for v in range(u + 1, half)]
    edges += [
        (u, v) for u in range(half, 2 * half) for v in range(u + 1, 2 * half)
    ]
    edges.append((half - 1, half))
    return Graph(2 * half, edges)


def fat_tree(k: int, include_hosts: bool = False) -> Graph:
    """k-ary fat tree: k pods of k/2 edge and k/2 aggregation switches,
    (k/2)**2 core switches, optionally k**3/4 hosts.

    Aggregation switch j of every pod uplinks to cores j*(k/2) ..
    j*(k/2)+k/2-1.  Vertex ids: cores, then per-pod aggregation switches,
    then per-pod edge switches, then hosts.
    """
    if k < 2 or k % 2 != 0:
        raise ParameterError("fat tree needs even k >= 2")
    half = k // 2
    n_core = half * half
    agg0 = n_core
    edge0 = agg0 + k * half
    host0 = edge0 + k * half

    def agg(pod: int, j: int) -> int:
        return agg0 + pod * half + j

    def edge_sw(pod: int, i: int) -> int:
        return edge0 + pod * half + i

    edges: list[tuple[int, int]] = []
    for pod in range(k):
        for i in range(half):
            for j in range(half):
                edges.append((edge_sw(pod, i), agg(pod, j)))
    for pod in range(k):
        for j in range(half):
            for c in range(j * half, (j + 1) * half):
                edges.append((agg(pod, j), c))
    n = host0
    if include_hosts:
        host = host0
        for pod in range(k):
            for i in range(half):
                for _ in range(half):
                    edges.append((edge_sw(pod, i), host))
                    host += 1
        n = host
    return Graph(n, edges)


_FAMILIES = {
    "complete": complete,
    "hypercube": hypercube,
    "random_regular": random_regular,
    "erdos_renyi": erdos_renyi,
    "barbell": barbell,
    "fat_tree": fat_tree,
}


def generate(family: str, *args, **kwargs) -> Graph:
    """Dispatch to a named generator: complete(n), hypercube(dim),
    random_regular(n, deg, seed), erdos_renyi(n, p, seed), barbell(half),
    fat_tree(k, include_hosts)."""
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise ParameterError(
            f"unknown family {family!r}; choose from {sorted(_FAMILIES)}"
        ) from None
    return builder(*args, **kwargs)


# ---------------------------------------------------------------------------
# set operations


def boundary(g: Graph, vertices: BitSet | Iterable[int]) -> BitSet:
    """Edge boundary of a vertex set: edges with exactly one endpoint inside."""
    amask = _as_vertex_mask(g, vertices)
    bits = 0
    for eid, (u, v) in enumerate(g.edges):
        if (amask >> u & 1) != (amask >> v & 1):
            bits |= 1 << eid
    return BitSet.from_mask(g.m, bits)


def edge_endpoints_cover(g: Graph, edge_set: BitSet | Iterable[int]) -> BitSet:
    """Vertices touched by at least one edge of the set."""
    if isinstance(edge_set, BitSet):
        if edge_set.capacity != g.m:
            raise ParameterError(f"edge set capacity {edge_set.capacity} != m={g.m}")
        ids: Iterable[int] = edge_set
    else:
        ids = BitSet(g.m, edge_set)
    bits = 0
    for eid in ids:
        u, v = g.edges[eid]
        bits |= (1 << u) | (1 << v)
    return BitSet.from_mask(g.n, bits)


# ---------------------------------------------------------------------------
# sparsification


def sparsify_mask(g: Graph, p: float, seed: int) -> np.ndarray:
    """Edge survival mask of G(p): one uniform per edge id, ascending order.

    This draw order is the reproducibility contract: anybody replaying
    Philox(seed) against the edge list gets the same subgraph.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    if g.m == 0:
        return np.zeros(0, dtype=bool)
    return make_rng(seed).random(g.m) < p


def sparsify(g: Graph, p: float, seed: int) -> Graph:
    """Random subgraph G(p) on the same vertex set.

    The result's `parent_edges` maps its edge ids back to g's ids.
    """
    keep = sparsify_mask(g, p, seed)
    kept_ids = tuple(int(i) for i in np.nonzero(keep)[0])
    return Graph(g.n, [g.edges[i] for i in kept_ids], parent_edges=kept_ids)


# ---------------------------------------------------------------------------
# components and cuts


def connected_components(g: Graph) -> ComponentLabeling:
    """BFS component decomposition with canonical labels."""
    labels = [-1] * g.n
    sizes: list[int] = []
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        lab = len(sizes)
        labels[s] = lab
        stack = [s]
        size = 1
        while stack:
            v = stack.pop()
            for w, _ in g.adjacency[v]:
                if labels[w] < 0:
                    labels[w] = lab
                    size += 1
                    stack.append(w)
        sizes.append(size)
    return ComponentLabeling(tuple(labels), tuple(sizes), len(sizes))


def min_cut(g: Graph) -> int:
    """Global minimum edge cut (Stoer-Wagner); 0 for disconnected graphs."""
    if g.n < 2:
        raise ParameterError("min cut needs n >= 2")
    if not g.is_connected():
        return 0
    n = g.n
    w = np.zeros((n, n), dtype=np.int64)
    for u, v in g.edges:
        w[u, v] += 1
        w[v, u] += 1
    active = list(range(n))
    best = math.inf
    while len(active) > 1:
        # maximum-adjacency order; the last vertex's attachment weight is
        # the cut of the phase
        conn = np.zeros(n, dtype=np.int64)
        selected = np.zeros(n, dtype=bool)
        order: list[int] = []
        for _ in range(len(active)):
            cand = [v for v in active if not selected[v]]
            v = max(cand, key=lambda x: (conn[x], -x))
            selected[v] = True
            order.append(v)
            conn[active] += w[v, active]
        s, t = order[-2], order[-1]
        best = min(best, int(conn[t] - w[t, t]))
        # merge t into s
        w[s, :] += w[t, :]
        w[:, s] += w[:, t]
        w[s, s] = 0
        active.remove(t)
        w[t, :] = 0
        w[:, t] = 0
    return int(best)


# ---------------------------------------------------------------------------
# expansion


def certify_expansion(
    g: Graph,
    beta: float | Fraction,
    *,
    samples: int = 2000,
    seed: int = 0,
) -> ExpansionCertificate:
    """Certificate for the min boundary-to-size ratio over small vertex sets.

    Exact (exhaustive subset scan, rational arithmetic, minimizing witness)
    for n <= 24; a clearly flagged sampling heuristic beyond that, since
    the exhaustive scan is exponential in n.  The heuristic value is an
    upper bound on the true alpha: it is the best ratio seen over sampled
    sets, never a certified minimum.
    """
    beta_f = Fraction(beta)
    if not Fraction(0) < beta_f <= Fraction(1, 2):
        raise ParameterError("beta must lie in (0, 1/2]")
    max_size = int(beta_f * g.n)  # floor
    if max_size < 1:
        raise ParameterError(f"beta*n = {beta_f * g.n} < 1: no eligible sets")

    if g.n <= 24:
        num, den, mask = _kernels.expansion_scan(
            g.adjacency_masks(), list(g.degrees()), max_size
        )
        return ExpansionCertificate(
            beta=beta_f,
            alpha=Fraction(num, den),
            witness=BitSet.from_mask(g.n, mask),
            exact=True,
        )

    return _sampled_expansion(g, beta_f, max_size, samples, seed)


def _sampled_expansion(
    g: Graph, beta_f: Fraction, max_size: int, samples: int, seed: int
) -> ExpansionCertificate:
    """Heuristic mode: singletons, BFS balls, and random subsets."""
    adj = g.adjacency_masks()
    degs = g.degrees()

    def ratio(mask: int, size: int) -> Fraction:
        # sum of (deg - inside-neighbors) counts every internal edge twice
        # negatively and twice positively, leaving exactly |boundary|
        bnd = sum(
            degs[v] - (adj[v] & mask).bit_count()
            for v in BitSet.from_mask(g.n, mask)
        )
        return Fraction(bnd, size)

    best_mask, best_ratio = 0, None

    def consider(mask: int) -> None:
        nonlocal best_mask, best_ratio
        size = mask.bit_count()
        if not 1 <= size <= max_size:
            return
        r = ratio(mask, size)
        if best_ratio is None or r < best_ratio:
            best_mask, best_ratio = mask, r

    for v in range(g.n):
        mask = 1 << v
        consider(mask)
        # grow a BFS ball around v up to max_size
        frontier = [v]
        members = [v]
        while len(members) < max_size and frontier:
            nxt = []
            for u in frontier:
                for w, _ in g.adjacency[u]:
                    if not mask >> w & 1:
                        mask |= 1 << w
                        members.append(w)
                        nxt.append(w)
                        consider(mask)
                        if len(members) >= max_size:
                            break
                if len(members) >= max_size:
                    break
            frontier = nxt

    rng = make_rng(derive_seed(seed, "expansion-sampling"))
    for _ in range(samples):
        size = 1 + int(rng.random() * max_size)
        verts = rng.choice(g.n, size=size, replace=False)
        consider(int(np.bitwise_or.reduce([1 << int(v) for v in verts])))

    assert best_ratio is not None
    return ExpansionCertificate(
        beta=beta_f,
        alpha=best_ratio,
        witness=BitSet.from_mask(g.n, best_mask),
        exact=False,
    )


def spectral_expansion_bounds(g: Graph) -> tuple[float, float]:
    """Cheeger-style sandwich ((D-lam)/2, sqrt(2D(D-lam))) for the
    half-beta expansion constant of a connected D-regular graph, where lam
    is the second-largest adjacency eigenvalue.

    lam comes from power iteration on A + D*I deflated against the
    all-ones vector (the shift keeps the second-largest eigenvalue
    dominant even on bipartite graphs, where the most negative eigenvalue
    is -D).  Iterates to relative tolerance 1e-9 on the Rayleigh quotient.
    """
    deg = g.regular_degree()
    if deg is None:
        raise ParameterError("spectral bounds need a regular graph")
    if not g.is_connected():
        raise ParameterError("spectral bounds need a connected graph")
    n = g.n
    if n < 2:
        raise ParameterError("need n >= 2")

    a = np.zeros((n, n))
    for u, v in g.edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    ones = np.full(n, 1.0 / math.sqrt(n))

    rng = make_rng(derive_seed("spectral-start"))
    v = rng.random(n) - 0.5
    v -= (v @ ones) * ones
    norm = np.linalg.norm(v)
    lam = -float(deg)
    if norm > 1e-12:
        v /= norm
        prev = math.inf
        for _ in range(200_000):
            w = a @ v + deg * v
            w -= (w @ ones) * ones
            norm = np.linalg.norm(w)
            if norm < 1e-30:
                lam = -float(deg)  # second eigenvalue of the shift is 0
                break
            v = w / norm
            rayleigh = float(v @ (a @ v))
            if abs(rayleigh - prev) <= 1e-12 * max(1.0, abs(rayleigh)):
                lam = rayleigh
                break
            prev = rayleigh
        else:
            lam = prev
    gap = max(0.0, deg - lam)
    return gap / 2.0, math.sqrt(2.0 * deg * gap)


# ---------------------------------------------------------------------------
# text format


def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise GraphFormatError("empty graph text")
    try:
        n, m = map(int, lines[0].split())
    except ValueError:
        raise GraphFormatError(f"bad header line {lines[0]!r}") from None
    if len(lines) < m + 1:
        raise GraphFormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for i in range(1, m + 1):
        try:
            u, v = map(int, lines[i].split())
        except ValueError:
            raise GraphFormatError(f"bad edge line {lines[i]!r}") from None
        if u >= v:
            raise GraphFormatError(f"edge line {i} must satisfy u < v")
        edges.append((u, v))
    return Graph(n, edges)


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(graph_to_text(g))


def read_graph(path) -> Graph:
    with open(path) as fh:
        return graph_from_text(fh.read())
