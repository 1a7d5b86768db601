"""Exact MWIS solving and exhaustive low-energy enumeration.

Both operations run a depth-first include/exclude search over a fixed vertex
order (descending degree) with an admissible residual bound: the minimum of
the remaining available weight and a static greedy-clique-cover bound over
the order suffix. Exactness is the whole point; exceeding a budget raises
instead of returning a silent suboptimum.

Exact weights are scaled to integers (value * 2 * denominator(w)), so the hot
loop is pure int arithmetic; float-weight graphs run the same search with
float comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .graphs import (
    EV_ZERO,
    BudgetError,
    ExactValue,
    Weight,
    WeightedGraph,
    adjacency_masks,
)

__all__ = [
    "EnergyWindow",
    "SearchBudget",
    "StateRecord",
    "count_all_is",
    "enumerate_low_energy",
    "iter_low_energy",
    "solve_mwis",
]


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10**9
    max_states: int = 10**7


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class EnergyWindow:
    """Window [E_mwis, E_mwis + delta_e_max] of energies above the optimum."""

    delta_e_max: Union[Fraction, float]

    def __post_init__(self):
        if self.delta_e_max < 0:
            raise ValueError("window width must be non-negative")


@dataclass(frozen=True)
class StateRecord:
    """An independent set together with its exact total weight.

    The energy is the negated weight; delta-e columns are derived against
    the instance optimum when records are written out.
    """

    bits: int
    weight: Weight

    def energy(self) -> Weight:
        return -self.weight


class _Problem:
    """Preprocessed search data for one graph at one weight evaluation.

    The residual bound is a greedy clique cover, evaluated against the live
    availability mask: an independent set takes at most one vertex per
    clique, so the sum over cliques of the heaviest still-available member
    bounds any completion. The cover is built in vertex-index order, which
    on chain-major hosts turns each chain into adjacent pairs and each
    gadget into its own clique.
    """

    __slots__ = (
        "n",
        "order",
        "adj_closed",
        "wnum",
        "halves",
        "biases",
        "exact",
        "scale",
        "clique_of",
        "clique_members",
    )

    def __init__(self, g: WeightedGraph, w: Union[Fraction, None]):
        self.n = g.n
        adj = adjacency_masks(g)
        self.adj_closed = tuple(adj[i] | (1 << i) for i in range(g.n))
        self.exact = g.is_exact
        if self.exact:
            if w is None:
                if any(x.wbias for x in g.weights):
                    raise ValueError("graph has biased weights; pass a rational w")
                w = Fraction(0)
            w = Fraction(w)
            self.scale = 2 * w.denominator
            self.halves = tuple(x.half for x in g.weights)
            self.biases = tuple(x.wbias for x in g.weights)
            self.wnum = tuple(
                x.half * w.denominator + 2 * x.wbias * w.numerator for x in g.weights
            )
        else:
            self.scale = None
            self.halves = self.biases = None
            self.wnum = tuple(g.weights)
        degrees = [adj[i].bit_count() for i in range(g.n)]
        self.order = tuple(sorted(range(g.n), key=lambda i: (-degrees[i], i)))
        cliques: list[tuple[int, list[int]]] = []  # (member mask, members)
        clique_of = [0] * g.n
        for v in range(g.n):
            for idx, (cmask, members) in enumerate(cliques):
                if cmask & ~self.adj_closed[v] == 0:
                    cliques[idx] = (cmask | (1 << v), members + [v])
                    clique_of[v] = idx
                    break
            else:
                clique_of[v] = len(cliques)
                cliques.append((1 << v, [v]))
        self.clique_of = tuple(clique_of)
        # members sorted by weight descending so the first available one is
        # the clique's contribution to the bound
        self.clique_members = tuple(
            tuple(sorted(members, key=lambda u: (-self.wnum[u], u)))
            for _, members in cliques
        )

    def initial_bound(self):
        return sum(self.wnum[members[0]] for members in self.clique_members)

    def clique_max(self, cid: int, mask: int):
        for u in self.clique_members[cid]:
            if (mask >> u) & 1:
                return self.wnum[u]
        return 0 if self.exact else 0.0


def _iter_states(prob: _Problem, threshold, budget: SearchBudget):
    """Yield (bits, scaled_weight, half, bias) for every IS with weight >= threshold."""
    n = prob.n
    order = prob.order
    adj_closed = prob.adj_closed
    wnum = prob.wnum
    exact = prob.exact
    halves = prob.halves
    biases = prob.biases
    clique_of = prob.clique_of
    members = prob.clique_members
    zero = 0 if exact else 0.0
    max_nodes = budget.max_nodes
    max_states = budget.max_states
    nodes = 0
    emitted = 0
    full = (1 << n) - 1
    if exact:
        start = (0, full, 0, 0, prob.initial_bound(), 0, 0)
    else:
        start = (0, full, 0, 0.0, prob.initial_bound(), 0.0, 0.0)
    stack = [start]
    pop = stack.pop
    push = stack.append
    while stack:
        idx, mask, bits, cur, bound, a, b = pop()
        nodes += 1
        if nodes > max_nodes:
            raise BudgetError(f"search node budget exceeded ({max_nodes})")
        while idx < n and not (mask >> order[idx]) & 1:
            idx += 1
        if mask == 0 or idx >= n:
            if cur >= threshold:
                emitted += 1
                if emitted > max_states:
                    raise BudgetError(f"emitted-state budget exceeded ({max_states})")
                yield bits, cur, a, b
            continue
        if cur + bound < threshold:
            continue
        v = order[idx]
        vbit = 1 << v
        # exclude v: only v's clique changes its available maximum
        cid = clique_of[v]
        mask_ex = mask & ~vbit
        bnd = bound
        row = members[cid]
        old = zero
        for u in row:
            if (mask >> u) & 1:
                old = wnum[u]
                break
        new = zero
        for u in row:
            if (mask_ex >> u) & 1:
                new = wnum[u]
                break
        push((idx + 1, mask_ex, bits, cur, bnd - old + new, a, b))
        # include v: v and its available neighbors disappear
        removed = mask & adj_closed[v]
        mask_in = mask & ~removed
        bnd = bound
        seen = 0
        m = removed
        while m:
            lsb = m & -m
            u = lsb.bit_length() - 1
            m ^= lsb
            cid = clique_of[u]
            cbit = 1 << cid
            if seen & cbit:
                continue
            seen |= cbit
            row = members[cid]
            for x in row:
                if (mask >> x) & 1:
                    bnd -= wnum[x]
                    break
            for x in row:
                if (mask_in >> x) & 1:
                    bnd += wnum[x]
                    break
        if exact:
            push(
                (
                    idx + 1,
                    mask_in,
                    bits | vbit,
                    cur + wnum[v],
                    bnd,
                    a + halves[v],
                    b + biases[v],
                )
            )
        else:
            push((idx + 1, mask_in, bits | vbit, cur + wnum[v], bnd, 0.0, 0.0))


def _max_weight(prob: _Problem, budget: SearchBudget):
    """Branch and bound for the maximum scaled weight over independent sets."""
    n = prob.n
    order = prob.order
    adj_closed = prob.adj_closed
    wnum = prob.wnum
    clique_of = prob.clique_of
    members = prob.clique_members
    zero = 0 if prob.exact else 0.0
    max_nodes = budget.max_nodes
    nodes = 0
    full = (1 << n) - 1
    # Greedy start: take vertices in search order whenever still available.
    best = zero
    m = full
    for v in order:
        if (m >> v) & 1:
            best += wnum[v]
            m &= ~adj_closed[v]
    stack = [(0, full, zero, prob.initial_bound())]
    while stack:
        idx, mask, cur, bound = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise BudgetError(f"search node budget exceeded ({max_nodes})")
        while idx < n and not (mask >> order[idx]) & 1:
            idx += 1
        if mask == 0 or idx >= n:
            if cur > best:
                best = cur
            continue
        if cur + bound <= best:
            continue
        v = order[idx]
        vbit = 1 << v
        cid = clique_of[v]
        mask_ex = mask & ~vbit
        row = members[cid]
        old = zero
        for u in row:
            if (mask >> u) & 1:
                old = wnum[u]
                break
        new = zero
        for u in row:
            if (mask_ex >> u) & 1:
                new = wnum[u]
                break
        stack.append((idx + 1, mask_ex, cur, bound - old + new))
        removed = mask & adj_closed[v]
        mask_in = mask & ~removed
        bnd = bound
        seen = 0
        m = removed
        while m:
            lsb = m & -m
            u = lsb.bit_length() - 1
            m ^= lsb
            cid2 = clique_of[u]
            cbit = 1 << cid2
            if seen & cbit:
                continue
            seen |= cbit
            row = members[cid2]
            for x in row:
                if (mask >> x) & 1:
                    bnd -= wnum[x]
                    break
            for x in row:
                if (mask_in >> x) & 1:
                    bnd += wnum[x]
                    break
        stack.append((idx + 1, mask_in, cur + wnum[v], bnd))
    return best


def _record(prob: _Problem, bits: int, scaled, a: int, b: int) -> StateRecord:
    if prob.exact:
        return StateRecord(bits, ExactValue(a, b))
    return StateRecord(bits, scaled)


def solve_mwis(
    g: WeightedGraph,
    w: Union[Fraction, None] = None,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> tuple[int, Weight]:
    """One maximum-weight independent set and the exact optimal weight.

    Among degenerate optima the smallest configuration integer is returned,
    so results are deterministic. Two phases: a tight branch and bound pins
    the optimal weight, then a width-0 enumeration collects the optima.
    """
    prob = _Problem(g, w)
    if g.n == 0:
        return 0, EV_ZERO if g.is_exact else 0.0
    best = _max_weight(prob, budget)
    winner = None
    record = None
    for bits, scaled, a, b in _iter_states(prob, best, budget):
        if scaled == best and (winner is None or bits < winner):
            winner = bits
            record = _record(prob, bits, scaled, a, b)
    return winner, record.weight


def iter_low_energy(
    g: WeightedGraph,
    window: Union[EnergyWindow, Fraction, float],
    w: Union[Fraction, None] = None,
    budget: SearchBudget = DEFAULT_BUDGET,
    w_max: Union[Weight, None] = None,
) -> Iterator[StateRecord]:
    """Stream every IS whose weight is within the window below the optimum.

    Emission follows the deterministic search order, not the canonical
    order; use enumerate_low_energy for the sorted form. Passing w_max skips
    the initial optimum computation.
    """
    if not isinstance(window, EnergyWindow):
        window = EnergyWindow(window)
    prob = _Problem(g, w)
    if g.n == 0:
        yield StateRecord(0, EV_ZERO if g.is_exact else 0.0)
        return
    if w_max is None:
        best = _max_weight(prob, budget)
    elif isinstance(w_max, ExactValue):
        ww = Fraction(w) if w is not None else Fraction(0)
        best = (w_max.value(ww)) * prob.scale
        if best != int(best):
            raise ValueError("w_max does not lie on the weight lattice")
        best = int(best)
    else:
        best = w_max
    if prob.exact:
        de_scaled = Fraction(window.delta_e_max) * prob.scale
        threshold = math.ceil(best - de_scaled)  # exact on Fractions
    else:
        threshold = best - float(window.delta_e_max)
    for bits, scaled, a, b in _iter_states(prob, threshold, budget):
        yield _record(prob, bits, scaled, a, b)


def enumerate_low_energy(
    g: WeightedGraph,
    window: Union[EnergyWindow, Fraction, float],
    w: Union[Fraction, None] = None,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> list[StateRecord]:
    """Canonically sorted window enumeration: energy ascending, then bits.

    Every independent set with weight >= W_max - delta_e_max appears exactly
    once regardless of the internal search order.
    """
    records = list(iter_low_energy(g, window, w, budget))
    if g.is_exact:
        ww = Fraction(w) if w is not None else Fraction(0)
        records.sort(key=lambda r: (-r.weight.value(ww), r.bits))
    else:
        records.sort(key=lambda r: (-r.weight, r.bits))
    return records


def count_all_is(g: WeightedGraph, max_nodes: int = 10**7) -> int:
    """Exact number of independent sets, the empty set included.

    Memoized splitting on the highest-degree remaining vertex v:
    count(G) = count(G - v) + count(G - N[v]).
    """
    adj = adjacency_masks(g)
    adj_closed = [adj[i] | (1 << i) for i in range(g.n)]
    degrees = [adj[i].bit_count() for i in range(g.n)]
    order = sorted(range(g.n), key=lambda i: (-degrees[i], i))
    memo: dict[int, int] = {0: 1}
    nodes = 0

    def count(mask: int) -> int:
        nonlocal nodes
        cached = memo.get(mask)
        if cached is not None:
            return cached
        nodes += 1
        if nodes > max_nodes:
            raise BudgetError(f"counting budget exceeded ({max_nodes})")
        for v in order:
            if (mask >> v) & 1:
                break
        result = count(mask & ~(1 << v)) + count(mask & ~adj_closed[v])
        memo[mask] = result
        return result

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, g.n * 4 + 100))
    try:
        return count((1 << g.n) - 1)
    finally:
        sys.setrecursionlimit(old)
