"""Test-collection constructions: connected-subgraph rounds, unconstrained
random tests, and random-walk tests with empirical mixing-time estimation.

All three produce a TestCollection over the edge ids of a source graph.
The connected-subgraph construction sparsifies the graph each round with
p = 1/(delta*d) and keeps large components (or just the largest); the
random construction includes each edge independently with p = 1/(d+1);
the walk construction collects the distinct edges of fixed-length simple
random walks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .errors import GraphFormatError, MixingTimeError, ParameterError
from .graphcore import Graph, sparsify_mask
from .randomness import derive_seed, make_rng

__all__ = [
    "TestCollection",
    "MakeTestsParams",
    "WalkParams",
    "make_tests",
    "random_tests",
    "estimate_mixing_time",
    "walk_params_for",
    "random_walk_tests",
    "read_tests",
    "write_tests",
    "tests_to_text",
    "tests_from_text",
]


class TestCollection:
    """Ordered tests over an edge universe of size m.

    Each test is a frozenset of edge ids.  Tests must be nonempty unless
    the construction explicitly permits empties (the i.i.d. random
    construction keeps them to preserve round accounting).
    """

    __slots__ = ("m", "tests", "_edge_bits", "_test_bits")

    def __init__(
        self,
        m: int,
        tests: Iterable[Iterable[int]],
        allow_empty: bool = False,
    ):
        if m < 0:
            raise ParameterError("universe size must be non-negative")
        frozen: list[frozenset[int]] = []
        for i, t in enumerate(tests):
            ft = frozenset(int(e) for e in t)
            for e in ft:
                if not 0 <= e < m:
                    raise ParameterError(f"test {i} contains edge {e} >= m={m}")
            if not ft and not allow_empty:
                raise ParameterError(f"test {i} is empty")
            frozen.append(ft)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "tests", tuple(frozen))
        object.__setattr__(self, "_edge_bits", None)
        object.__setattr__(self, "_test_bits", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("TestCollection is immutable")

    def __len__(self) -> int:
        return len(self.tests)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.tests)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.tests[i]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TestCollection)
            and self.m == other.m
            and self.tests == other.tests
        )

    def __hash__(self) -> int:
        return hash((self.m, self.tests))

    def __repr__(self) -> str:
        return f"TestCollection(m={self.m}, tests={len(self.tests)})"

    def test_bits(self) -> list[int]:
        """Per-test edge masks (bit e set iff edge e is in the test)."""
        cached = self._test_bits
        if cached is None:
            cached = [sum(1 << e for e in t) for t in self.tests]
            object.__setattr__(self, "_test_bits", cached)
        return cached

    def edge_bits(self) -> list[int]:
        """Per-edge test-membership masks (bit i set iff test i contains e)."""
        cached = self._edge_bits
        if cached is None:
            cached = [0] * self.m
            for i, t in enumerate(self.tests):
                bit = 1 << i
                for e in t:
                    cached[e] |= bit
            object.__setattr__(self, "_edge_bits", cached)
        return cached


@dataclass(frozen=True)
class MakeTestsParams:
    """Parameters of the connected-subgraph construction.

    The sparsification probability is p = 1/(delta*d); delta >= 2/d keeps
    p <= 1/2.  In all_large mode every component of at least beta*n
    vertices becomes a test; largest_only keeps just the biggest component
    (ties broken toward the one containing the smallest vertex id).
    """

    d: int
    delta: float | Fraction
    beta: float | Fraction
    tau: int
    mode: str = "all_large"
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("d must be >= 1")
        if Fraction(self.delta) < Fraction(2, self.d):
            raise ParameterError(f"delta must be >= 2/d = {Fraction(2, self.d)}")
        if not Fraction(0) < Fraction(self.beta) <= Fraction(1, 2):
            raise ParameterError("beta must lie in (0, 1/2]")
        if self.tau < 1:
            raise ParameterError("tau must be >= 1")
        if self.mode not in ("all_large", "largest_only"):
            raise ParameterError("mode must be all_large or largest_only")

    @property
    def p(self) -> float:
        return float(1 / (Fraction(self.delta) * self.d))

    @property
    def beta_fraction(self) -> Fraction:
        return Fraction(self.beta)


def make_tests(g: Graph, params: MakeTestsParams) -> TestCollection:
    """Connected-subgraph tests from `params.tau` sparsification rounds.

    Round t uses the sub-seed derive_seed(params.seed, t), so rounds can
    be computed in any order (or concurrently) with identical output.
    Components whose surviving edge set is empty are never emitted; a
    round may contribute no test at all.
    """
    beta_n = params.beta_fraction * g.n
    if beta_n < 2:
        raise ParameterError(f"beta*n = {beta_n} < 2")
    if not g.is_connected():
        warnings.warn("make_tests on a disconnected graph", stacklevel=2)
    p = params.p
    eu, ev = g.edge_endpoint_arrays()
    min_vertices = -(-beta_n.numerator // beta_n.denominator)  # ceil
    tests: list[frozenset[int]] = []
    for t in range(params.tau):
        survivors = sparsify_mask(g, p, derive_seed(params.seed, t))
        if not survivors.any():
            continue
        labels = np.asarray(_kernels.component_labels(g.n, eu, ev, survivors))
        sizes = np.bincount(labels)
        if params.mode == "all_large":
            chosen = np.nonzero(sizes >= min_vertices)[0]
        else:
            # canonical labels are ordered by smallest member vertex, so the
            # first maximal label is the tie-break winner
            chosen = [int(np.flatnonzero(sizes == sizes.max())[0])]
        edge_label = labels[eu]
        for lab in chosen:
            ids = np.nonzero(survivors & (edge_label == lab))[0]
            if len(ids):
                tests.append(frozenset(int(i) for i in ids))
    return TestCollection(g.m, tests)


def random_tests(m: int, d: int, tau: int, seed: int) -> TestCollection:
    """tau unconstrained random tests, each edge kept with p = 1/(d+1).

    Empty tests are retained: they are a faithful outcome of the i.i.d.
    model and keep the test count at exactly tau.
    """
    if m < 1 or d < 1 or tau < 1:
        raise ParameterError("need m >= 1, d >= 1, tau >= 1")
    keep = make_rng(seed).random((tau, m)) < 1.0 / (d + 1)
    tests = [frozenset(int(e) for e in np.nonzero(row)[0]) for row in keep]
    return TestCollection(m, tests, allow_empty=True)


def _degree_ratio(g: Graph) -> int:
    degs = g.degrees()
    return math.ceil(max(degs) / min(degs))


def estimate_mixing_time(g: Graph, seed: int) -> int:
    """First step at which a simple random walk from a random start vertex
    is within total-variation 1/(2cn)^2 of its equilibrium deg(v)/2m.

    The distribution is advanced by exact dense transition application (no
    sampling).  Bipartite graphs automatically get the lazy walk (hold
    probability 1/2), since the plain walk is periodic and never
    converges.  Raises MixingTimeError past 10*n^2 steps.
    """
    if g.n < 2 or g.m < 1:
        raise ParameterError("mixing time needs n >= 2 and at least one edge")
    if not g.is_connected():
        raise ParameterError("mixing time needs a connected graph")
    n = g.n
    c = _degree_ratio(g)
    threshold = 1.0 / (2 * c * n) ** 2
    degs = np.array(g.degrees(), dtype=np.float64)
    pi = degs / (2.0 * g.m)
    trans = np.zeros((n, n))
    for u, v in g.edges:
        trans[u, v] = 1.0 / degs[u]
        trans[v, u] = 1.0 / degs[v]
    if g.is_bipartite():
        trans = 0.5 * (np.eye(n) + trans)
    start = min(int(make_rng(seed).random() * n), n - 1)
    x = np.zeros(n)
    x[start] = 1.0
    cap = 10 * n * n
    for t in range(1, cap + 1):
        x = x @ trans
        if 0.5 * np.abs(x - pi).sum() < threshold:
            return t
    raise MixingTimeError(f"no mixing within {cap} steps (threshold {threshold:g})")


@dataclass(frozen=True)
class WalkParams:
    """Random-walk construction parameters.

    c (max degree over min degree, rounded up) and tau_mix (estimated
    mixing time) are graph-derived; build them with walk_params_for.  The
    walk length on a graph with n vertices and min degree D is
    ceil(l*n*D / (c^3 * d * tau_mix)).
    """

    d: int
    l: float
    tau: int
    seed: int
    c: int
    tau_mix: int

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("d must be >= 1")
        if not self.l > 0:
            raise ParameterError("l must be positive")
        if self.tau < 1:
            raise ParameterError("tau must be >= 1")
        if self.c < 1 or self.tau_mix < 1:
            raise ParameterError("c and tau_mix must be >= 1")

    def walk_length(self, g: Graph) -> int:
        min_deg = min(g.degrees())
        raw = self.l * g.n * min_deg / (self.c**3 * self.d * self.tau_mix)
        return math.ceil(raw)


def walk_params_for(
    g: Graph, d: int, l: float, tau: int, seed: int, mixing_seed: int | None = None
) -> WalkParams:
    """Derive c and the mixing time from the graph and bundle WalkParams."""
    if mixing_seed is None:
        mixing_seed = derive_seed(seed, "mixing")
    return WalkParams(
        d=d,
        l=l,
        tau=tau,
        seed=seed,
        c=_degree_ratio(g),
        tau_mix=estimate_mixing_time(g, mixing_seed),
    )


def random_walk_tests(g: Graph, params: WalkParams) -> TestCollection:
    """tau tests, each the distinct-edge set of one fixed-length simple
    random walk from an independently uniform start vertex.

    Walk w uses the sub-seed derive_seed(params.seed, w): one uniform for
    the start vertex, then one per step for the neighbor choice.
    """
    if not g.is_connected():
        raise ParameterError("random walks need a connected graph")
    length = params.walk_length(g)
    if length < 1:
        warnings.warn("computed walk length < 1; clamping to 1", stacklevel=2)
        length = 1
    indptr, neighbors, edge_ids = g.csr_adjacency()
    tests = []
    for w in range(params.tau):
        us = make_rng(derive_seed(params.seed, w)).random(length + 1)
        start = min(int(us[0] * g.n), g.n - 1)
        ids = _kernels.walk_edges(indptr, neighbors, edge_ids, start, length, us[1:])
        tests.append(frozenset(int(i) for i in ids))
    return TestCollection(g.m, tests)


# ---------------------------------------------------------------------------
# text format


def tests_to_text(tc: TestCollection) -> str:
    lines = [f"{tc.m} {len(tc.tests)}"]
    lines += [" ".join(str(e) for e in sorted(t)) for t in tc.tests]
    return "\n".join(lines) + "\n"


def tests_from_text(text: str) -> TestCollection:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty test-collection text")
    try:
        m, t = map(int, lines[0].split())
    except ValueError:
        raise GraphFormatError(f"bad header line {lines[0]!r}") from None
    if len(lines) < t + 1:
        raise GraphFormatError(f"expected {t} test lines, found {len(lines) - 1}")
    tests = []
    for i in range(1, t + 1):
        try:
            tests.append([int(x) for x in lines[i].split()])
        except ValueError:
            raise GraphFormatError(f"bad test line {lines[i]!r}") from None
    return TestCollection(m, tests, allow_empty=True)


def write_tests(tc: TestCollection, path) -> None:
    with open(path, "w") as fh:
        fh.write(tests_to_text(tc))


def read_tests(path) -> TestCollection:
    with open(path) as fh:
        return tests_from_text(fh.read())
