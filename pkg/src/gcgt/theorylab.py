"""Empirical checks of the probabilistic guarantees behind the
connected-subgraph construction.

The centerpiece is the edge-exploration process: starting from a single
conditioned-surviving edge, probe one frontier edge per step (survive
with probability p) until the frontier empties.  Its terminal vertex set
has exactly the distribution of the component containing that edge in the
sparsified graph, which this module can verify in exact rational
arithmetic on small graphs.  The escape behavior of the matching biased
walk, the gambler's-ruin closed form it rests on, and the
large-component and connectivity rates are all checkable here against
their theoretical bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import ParameterError
from .graphcore import BitSet, Graph, sparsify_mask
from .randomness import derive_seed, make_rng

__all__ = [
    "TraceStep",
    "ExplorationTrace",
    "RuinParams",
    "explore_component",
    "exact_terminal_distribution",
    "conditional_component_distribution",
    "GiantComponentReport",
    "giant_component_rate",
    "gamblers_ruin",
    "ruin_oracle",
    "EscapeReport",
    "exploration_bound_check",
    "connectivity_rate",
]

# The bound p*eps/8 only applies for eps strictly inside (0, 1/3).
_EPS_LO = 0.0
_EPS_HI = 1.0 / 3.0


@dataclass(frozen=True)
class TraceStep:
    """One step of the exploration process, recorded after its effect.

    Step 1 is the conditioned initial edge (survived by definition);
    every later step probes the smallest-id frontier edge.  Sizes satisfy
    s_size + b_size = t and |N(S)| = s_size + 1 at every step.
    """

    t: int
    edge: int
    survived: bool
    s_size: int
    b_size: int
    u_size: int


@dataclass(frozen=True)
class ExplorationTrace:
    steps: tuple[TraceStep, ...]
    terminal: bool  # frontier emptied
    capped: bool  # |S| exceeded beta*n + 1 (the success cap)
    final_vertices: BitSet

    @property
    def final_vertex_count(self) -> int:
        return len(self.final_vertices)


def _frontier(g: Graph, nmask: int, dead: set[int]) -> list[int]:
    """Edges with exactly one endpoint among the reached vertices, minus
    probed-dead edges.  Tree edges of S have both endpoints reached, so
    they exclude themselves."""
    out = []
    for eid, (u, v) in enumerate(g.edges):
        if ((nmask >> u) & 1) != ((nmask >> v) & 1) and eid not in dead:
            out.append(eid)
    return out


def explore_component(
    g: Graph, e: int, p: float, beta: float | Fraction, seed: int
) -> ExplorationTrace:
    """Run the exploration process from edge e, conditioning on e surviving.

    The frontier edge probed each step is the smallest id (the process
    distribution does not depend on this choice).  Stops when the
    frontier empties or |S| exceeds beta*n + 1.
    """
    if not 0 <= e < g.m:
        raise ParameterError(f"edge {e} outside [0, {g.m})")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    beta_n = Fraction(beta) * g.n
    if beta_n < 2:
        raise ParameterError(f"beta*n = {beta_n} < 2")
    cap = beta_n + 1

    rng = make_rng(seed)
    u0, v0 = g.edges[e]
    nmask = (1 << u0) | (1 << v0)
    survivors = {e}
    dead: set[int] = set()
    frontier = _frontier(g, nmask, dead)
    steps = [TraceStep(1, e, True, 1, 0, len(frontier))]
    capped = False
    t = 1
    while frontier and not capped:
        t += 1
        probe = min(frontier)
        survived = bool(rng.random() < p)
        if survived:
            survivors.add(probe)
            u, v = g.edges[probe]
            nmask |= (1 << u) | (1 << v)
        else:
            dead.add(probe)
        frontier = _frontier(g, nmask, dead)
        capped = len(survivors) > cap
        steps.append(
            TraceStep(t, probe, survived, len(survivors), len(dead), len(frontier))
        )
    return ExplorationTrace(
        steps=tuple(steps),
        terminal=not frontier,
        capped=capped,
        final_vertices=BitSet.from_mask(g.n, nmask),
    )


def exact_terminal_distribution(
    g: Graph, e: int, p: Fraction
) -> dict[int, Fraction]:
    """Exact law of the terminal reached-vertex count of the exploration
    process (no cap), by enumerating every branch of the process tree."""
    if not 0 <= e < g.m:
        raise ParameterError(f"edge {e} outside [0, {g.m})")
    p = Fraction(p)
    out: dict[int, Fraction] = {}

    def rec(nmask: int, dead: frozenset[int], prob: Fraction) -> None:
        frontier = _frontier(g, nmask, dead)
        if not frontier:
            size = nmask.bit_count()
            out[size] = out.get(size, Fraction(0)) + prob
            return
        probe = min(frontier)
        u, v = g.edges[probe]
        if p > 0:
            rec(nmask | (1 << u) | (1 << v), dead, prob * p)
        if p < 1:
            rec(nmask, dead | {probe}, prob * (1 - p))

    u0, v0 = g.edges[e]
    rec((1 << u0) | (1 << v0), frozenset(), Fraction(1))
    return out


def conditional_component_distribution(
    g: Graph, e: int, p: Fraction
) -> dict[int, Fraction]:
    """Exact law of the vertex count of e's component in the sparsified
    graph, conditioned on e surviving: brute force over all 2^(m-1)
    survival patterns of the other edges."""
    if not 0 <= e < g.m:
        raise ParameterError(f"edge {e} outside [0, {g.m})")
    p = Fraction(p)
    others = [i for i in range(g.m) if i != e]
    k = len(others)
    pow_p = [Fraction(1)] * (k + 1)
    pow_q = [Fraction(1)] * (k + 1)
    for i in range(k):
        pow_p[i + 1] = pow_p[i] * p
        pow_q[i + 1] = pow_q[i] * (1 - p)
    out: dict[int, Fraction] = {}
    for bits in range(1 << k):
        ones = bits.bit_count()
        prob = pow_p[ones] * pow_q[k - ones]
        if prob == 0:
            continue
        kept = [e] + [others[i] for i in range(k) if (bits >> i) & 1]
        size = _component_vertex_count(g, kept, e)
        out[size] = out.get(size, Fraction(0)) + prob
    return out


def _component_vertex_count(g: Graph, kept: list[int], e: int) -> int:
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid in kept:
        u, v = g.edges[eid]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    anchor = find(g.edges[e][0])
    return sum(1 for x in range(g.n) if find(x) == anchor)


@dataclass(frozen=True)
class GiantComponentReport:
    """Empirical large-component rate next to the theoretical bound.

    bound is p*eps/8 when eps = p*alpha - 1 lies in (0, 1/3), else None
    (the theorem does not apply; nothing is extrapolated).
    """

    rate: float
    bound: float | None
    epsilon: float | None
    trials: int
    successes: int

    @property
    def stderr(self) -> float:
        return math.sqrt(self.rate * (1.0 - self.rate) / self.trials)

    def __iter__(self) -> Iterator[float | None]:
        return iter((self.rate, self.bound))


def _bound_from_alpha(
    p: float, alpha: float | Fraction | None
) -> tuple[float | None, float | None]:
    if alpha is None:
        return None, None
    eps = p * float(alpha) - 1.0
    if _EPS_LO < eps < _EPS_HI:
        return p * eps / 8.0, eps
    return None, eps


def giant_component_rate(
    g: Graph,
    e: int,
    p: float,
    beta: float | Fraction,
    trials: int,
    seed: int,
    *,
    alpha: float | Fraction | None = None,
) -> GiantComponentReport:
    """Fraction of sparsifications where e survives into a component of at
    least beta*n vertices, next to the p*eps/8 bound.

    alpha is the caller's expansion constant (e.g. from
    certify_expansion); without it, or with eps = p*alpha - 1 outside
    (0, 1/3), the bound is reported as None.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if not 0 <= e < g.m:
        raise ParameterError(f"edge {e} outside [0, {g.m})")
    beta_n = Fraction(beta) * g.n
    min_vertices = -(-beta_n.numerator // beta_n.denominator)
    survivors = np.empty((trials, g.m), dtype=bool)
    for t in range(trials):
        survivors[t] = sparsify_mask(g, p, derive_seed(seed, t))
    eu, ev = g.edge_endpoint_arrays()
    sizes = np.asarray(
        _kernels.component_size_at_edge(g.n, eu, ev, survivors, e)
    )
    successes = int((sizes >= min_vertices).sum())
    bound, eps = _bound_from_alpha(p, alpha)
    return GiantComponentReport(
        rate=successes / trials,
        bound=bound,
        epsilon=eps,
        trials=trials,
        successes=successes,
    )


@dataclass(frozen=True)
class RuinParams:
    """Asymmetric gambler's ruin: step +1 with probability gamma, else -1;
    asks for the probability of reaching +up before -down."""

    gamma: float
    up: int
    down: int

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError("gamma must lie in [0, 1]")
        if self.up < 1 or self.down < 1:
            raise ParameterError("targets must be >= 1")


def gamblers_ruin(params: RuinParams) -> float:
    """Closed form (1 - phi^down) / (1 - phi^(down+up)), phi = (1-g)/g.

    The symmetric branch down/(down+up) is taken when |gamma - 1/2| <
    1e-12; gamma of exactly 0 or 1 short-circuits.  Near 1/2 the naive
    form cancels catastrophically, so powers go through expm1/log1p.
    """
    gamma = params.gamma
    if gamma == 0.0:
        return 0.0
    if gamma == 1.0:
        return 1.0
    if abs(gamma - 0.5) < 1e-12:
        return params.down / (params.down + params.up)
    log_phi = math.log1p((1.0 - 2.0 * gamma) / gamma)
    return math.expm1(params.down * log_phi) / math.expm1(
        (params.down + params.up) * log_phi
    )


def ruin_oracle(params: RuinParams, tol: float = 1e-15) -> float:
    """Independent check of gamblers_ruin: value iteration on the absorbing
    chain over integer positions -down..up, swept until the update stalls
    below tol."""
    gamma = params.gamma
    size = params.down + params.up + 1
    values = np.zeros(size)
    values[-1] = 1.0  # position +up
    interior = slice(1, size - 1)
    for _ in range(10_000_000):
        nxt = values.copy()
        nxt[interior] = gamma * values[2:] + (1.0 - gamma) * values[:-2]
        delta = float(np.max(np.abs(nxt - values)))
        values = nxt
        if delta < tol:
            break
    return float(values[params.down])


@dataclass(frozen=True)
class EscapeReport:
    """Escape rate of the biased walk (up alpha w.p. p, down 1 w.p. 1-p)
    beside the eps/8 claim and the exploration process's own success rate."""

    escape_rate: float
    bound: float | None
    epsilon: float | None
    exploration_success_rate: float
    trials: int

    @property
    def stderr(self) -> float:
        return math.sqrt(self.escape_rate * (1.0 - self.escape_rate) / self.trials)


def exploration_bound_check(
    g: Graph,
    e: int,
    p: float,
    beta: float | Fraction,
    trials: int,
    seed: int,
    *,
    alpha: float | Fraction,
) -> EscapeReport:
    """Simulate the walk dominating the exploration process and report its
    empirical escape probability (reaching total beta*n*(1+alpha) before
    ever dipping to -alpha) next to eps/8, plus the exploration process's
    success rate on the actual graph for side-by-side comparison."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    alpha_f = Fraction(alpha)
    scale = alpha_f.denominator
    up = alpha_f.numerator  # alpha * scale
    down = scale  # 1 * scale
    ruin_level = -up
    target = Fraction(beta) * g.n * (1 + alpha_f) * scale
    escape_level = -(-target.numerator // target.denominator)  # ceil

    escapes = 0
    for t in range(trials):
        rng = make_rng(derive_seed(seed, "walk", t))
        z = 0
        while ruin_level < z < escape_level:
            if rng.random() < p:
                z += up
            else:
                z -= down
        if z >= escape_level:
            escapes += 1

    explore_successes = 0
    for t in range(trials):
        trace = explore_component(g, e, p, beta, derive_seed(seed, "explore", t))
        if trace.capped:
            explore_successes += 1

    bound, eps = _bound_from_alpha(p, alpha_f)
    if bound is not None:
        bound = eps / 8.0  # the walk claim is eps/8, without the p factor
    return EscapeReport(
        escape_rate=escapes / trials,
        bound=bound,
        epsilon=eps,
        exploration_success_rate=explore_successes / trials,
        trials=trials,
    )


def connectivity_rate(g: Graph, p: float, trials: int, seed: int) -> float:
    """Fraction of sparsifications of g that remain connected."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if g.n == 0:
        raise ParameterError("empty graph")
    survivors = np.empty((trials, g.m), dtype=bool)
    for t in range(trials):
        survivors[t] = sparsify_mask(g, p, derive_seed(seed, t))
    eu, ev = g.edge_endpoint_arrays()
    connected = np.asarray(_kernels.connected_trials(g.n, eu, ev, survivors))
    return float(connected.sum()) / trials
