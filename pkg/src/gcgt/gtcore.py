"""Group-testing semantics: outcomes, the naive decoder, exact
d-disjunctness checking, and the singleton lower-bound witness.

A collection is d-disjunct when every edge e outside every set B of at
most d other edges has some test containing e and missing B.  That makes
the naive decoder exact: declare e defective iff every test containing e
fired.  Note the decoder's loud convention: an edge covered by no test is
declared defective (the universal quantifier over its tests is vacuous),
so callers that need conservatism must check coverage separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _kernels
from .errors import BudgetExceededError, ParameterError
from .graphcore import Graph
from .testgen import TestCollection

__all__ = [
    "DisjunctnessReport",
    "run_tests",
    "decode",
    "check_disjunct",
    "witness_violates",
    "singleton_witness",
    "enumeration_cost",
    "ENUMERATION_BUDGET",
]

# Cap on projected mask-word operations for check_disjunct; large enough
# for the m~256, d=2 experiment scale, refused beyond.
ENUMERATION_BUDGET = 10**10


@dataclass(frozen=True)
class DisjunctnessReport:
    """Outcome of a d-disjunctness check.

    A witness (e, B) certifies failure: every test containing e meets B,
    |B| <= d, e not in B.  B is empty exactly when no test contains e.
    The witness is the first in (e, |B|, lexicographic B) order.
    """

    disjunct: bool
    d: int
    witness: tuple[int, frozenset[int]] | None


def _as_defective_set(m: int, defectives: Iterable[int]) -> frozenset[int]:
    b = frozenset(int(e) for e in defectives)
    for e in b:
        if not 0 <= e < m:
            raise ParameterError(f"defective edge {e} outside [0, {m})")
    return b


def run_tests(tests: TestCollection, defectives: Iterable[int]) -> tuple[bool, ...]:
    """Outcome vector: test i fires iff it intersects the defective set."""
    b = _as_defective_set(tests.m, defectives)
    bmask = sum(1 << e for e in b)
    return tuple(bool(tb & bmask) for tb in tests.test_bits())


def decode(tests: TestCollection, outcomes: Sequence[bool]) -> frozenset[int]:
    """Naive decoder: e is defective iff every test containing e fired.

    Edges in no test decode as defective (vacuous universal).
    """
    if len(outcomes) != len(tests.tests):
        raise ParameterError(
            f"{len(outcomes)} outcomes for {len(tests.tests)} tests"
        )
    negative_mask = 0
    for i, out in enumerate(outcomes):
        if not out:
            negative_mask |= 1 << i
    return frozenset(
        e for e, bits in enumerate(tests.edge_bits()) if bits & negative_mask == 0
    )


def enumeration_cost(m: int, d: int, n_tests: int) -> int:
    """Projected mask-word operations of check_disjunct: for each edge,
    all candidate sets of size <= d, times the mask word count."""
    words = max(1, -(-max(n_tests, 1) // 64))
    combos = sum(math.comb(max(m - 1, 0), k) for k in range(d + 1))
    return m * combos * words


def check_disjunct(
    tests: TestCollection, d: int, budget: int = ENUMERATION_BUDGET
) -> DisjunctnessReport:
    """Exact d-disjunctness check with a self-verifying first witness.

    Edge-to-test membership is held as bit masks over tests; the check
    enumerates, per edge e, candidate sets B in (|B|, lex) order and tests
    whether the union of their masks covers e's mask.  Refuses inputs
    whose projected enumeration exceeds `budget` word operations
    (d <= 2 at m ~ 256 and any d at m <= 25 stay well inside).
    """
    if d < 1:
        raise ParameterError("d must be >= 1")
    cost = enumeration_cost(tests.m, d, len(tests.tests))
    if cost > budget:
        raise BudgetExceededError(
            f"projected {cost:.2e} mask operations exceed budget {budget:.0e}"
        )
    hit = _kernels.disjunct_witness(tests.edge_bits(), d)
    if hit is None:
        return DisjunctnessReport(disjunct=True, d=d, witness=None)
    e, b = hit
    return DisjunctnessReport(disjunct=False, d=d, witness=(e, frozenset(b)))


def witness_violates(
    tests: TestCollection, d: int, e: int, defectives: Iterable[int]
) -> bool:
    """Replay a claimed witness against the disjunctness definition."""
    b = _as_defective_set(tests.m, defectives)
    if e in b or len(b) > d or not 0 <= e < tests.m:
        return False
    return all(t & b for t in tests.tests if e in t)


def singleton_witness(
    g: Graph, tests: TestCollection, d: int
) -> tuple[int, frozenset[int]] | None:
    """Disjunctness counterexample for regular graphs with d >= 2D-2.

    If some edge e = (u, v) has no singleton test, the set B of all edges
    adjacent to e (|B| = 2D-2 <= d) blocks every connected test through e
    except {e} itself.  Returns the smallest such e with its B, or None
    when every singleton is present.  Requires every test to be a
    connected subgraph of g, which is what makes the argument sound.
    """
    deg = g.regular_degree()
    if deg is None:
        raise ParameterError("singleton witness needs a regular graph")
    if d < 2 * deg - 2:
        raise ParameterError(f"need d >= 2D-2 = {2 * deg - 2}")
    if tests.m != g.m:
        raise ParameterError("test collection does not match the graph")
    for i, t in enumerate(tests.tests):
        if not _edges_connected(g, t):
            raise ParameterError(f"test {i} is not a connected subgraph")
    singles = {next(iter(t)) for t in tests.tests if len(t) == 1}
    for e in range(g.m):
        if e in singles:
            continue
        u, v = g.edges[e]
        adjacent = frozenset(
            eid for _, eid in g.adjacency[u] + g.adjacency[v] if eid != e
        )
        return e, adjacent
    return None


def _edges_connected(g: Graph, edge_set: frozenset[int]) -> bool:
    if not edge_set:
        return False
    verts: set[int] = set()
    for eid in edge_set:
        u, v = g.edges[eid]
        verts.update((u, v))
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for w, eid in g.adjacency[x]:
            if eid in edge_set and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == verts
