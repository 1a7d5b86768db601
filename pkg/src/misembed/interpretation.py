"""Interpretation of defective host configurations.

Two strategies are implemented. The distance strategy maps a host state to
its nearest embedded configuration in Hamming distance, found either by
scanning all embedded states (exact brute force) or by minimizing the
equivalent quadratic binary form assembled from per-chain and per-gadget
distances. The deselection strategy declares every defective chain
unselected, which costs only a walk over the host.

Approximation ratios are exact rationals; the deselection lower bound
r >= 1 - (E - E_mwis) / (2w |MIS|) is checked with exact arithmetic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .graphs import BudgetError, ExactValue, WeightedGraph, is_independent, make_graph, total_weight
from .lattice import CrossingLattice, _af_masks, _chain_bits, embed, interpretable_states
from .solver import solve_mwis

__all__ = [
    "DeselectResult",
    "DistanceResult",
    "QuboInstance",
    "TiePolicy",
    "approx_ratio",
    "build_qubo",
    "deselect",
    "deselection_bound_check",
    "distance_bruteforce",
    "distance_via_mwis_reduction",
    "host_ratio",
    "solve_qubo",
]


class TiePolicy(enum.Enum):
    """How to score equidistant nearest states; never affects the distance."""

    PESSIMISTIC = "pessimistic"  # lowest ratio among ties
    OPTIMISTIC = "optimistic"  # highest ratio among ties
    FIRST = "first"  # first in ascending configuration-integer order
    LAST = "last"  # last in that order


@dataclass(frozen=True)
class DistanceResult:
    d: int
    nearest_set: tuple[int, ...]  # source bitmasks of all states at distance d
    r: Fraction
    tie_flag: bool


@dataclass(frozen=True)
class DeselectResult:
    source_bits: int
    r: Fraction
    deselected_chains: tuple[int, ...]
    repaired_edges: tuple[tuple[int, int], ...]


@lru_cache(maxsize=128)
def _embedded_table(cl: CrossingLattice) -> tuple[tuple[int, int], ...]:
    # (source bits, host bits), ascending source bits: the documented order
    # behind the FIRST/LAST tie policies.
    return tuple(interpretable_states(cl))


@lru_cache(maxsize=128)
def source_mis(cl: CrossingLattice) -> tuple[int, int]:
    """(bits, size) of one maximum independent set of the source graph."""
    bits, weight = solve_mwis(cl.source)
    return bits, weight.half // 2


def _exact_weight_value(wt, w: Union[Fraction, None]) -> Fraction:
    if isinstance(wt, Fraction):
        return wt
    if wt.wbias and w is None:
        raise ValueError("a concrete w is required for biased weights")
    return wt.value(Fraction(w) if w is not None else Fraction(0))


def approx_ratio(
    g: WeightedGraph,
    s: int,
    optimum: Union[Fraction, None] = None,
    w: Union[Fraction, None] = None,
) -> Fraction:
    """Achieved weight over optimal weight, as an exact rational."""
    if not is_independent(g, s):
        raise ValueError("approximation ratio requires an independent set")
    if optimum is None:
        _, wt = solve_mwis(g, w)
        optimum = _exact_weight_value(wt, w)
    if optimum == 0:
        return Fraction(1)
    return _exact_weight_value(total_weight(g, s), w) / optimum


def host_ratio(e_state: Fraction, e_mwis: Fraction, mwis_weight: Fraction) -> Fraction:
    """Host-side ratio 1 - (E - E_mwis) / |MWIS weight|."""
    return 1 - (e_state - e_mwis) / mwis_weight


def distance_bruteforce(
    cl: CrossingLattice, host_bits: int, policy: TiePolicy = TiePolicy.PESSIMISTIC
) -> DistanceResult:
    """Exact nearest-embedded-state search by scanning every embedded state."""
    table = _embedded_table(cl)
    _, mis_size = source_mis(cl)
    best = None
    nearest: list[int] = []
    for sbits, hbits in table:
        d = (host_bits ^ hbits).bit_count()
        if best is None or d < best:
            best = d
            nearest = [sbits]
        elif d == best:
            nearest.append(sbits)
    ratios = [Fraction(s.bit_count(), mis_size) for s in nearest]
    if policy is TiePolicy.PESSIMISTIC:
        r = min(ratios)
    elif policy is TiePolicy.OPTIMISTIC:
        r = max(ratios)
    elif policy is TiePolicy.FIRST:
        r = ratios[0]
    else:
        r = ratios[-1]
    return DistanceResult(best, tuple(nearest), r, len(nearest) > 1)


@dataclass(frozen=True)
class QuboInstance:
    """Quadratic form whose value at any independent selection of chains is
    the Hamming distance to the matching embedded configuration.

    constant + sum(linear[p] n_p) + sum(quadratic[pq] n_p n_q over non-edges)
    + sum(penalty[pq] n_p n_q over source edges); the penalty strictly
    dominates every attainable distance, so the unconstrained minimum is
    always attained on an independent set.
    """

    n: int
    constant: int
    linear: tuple[int, ...]
    quadratic: tuple[tuple[int, int, int], ...]  # (p, q, coeff) on non-edges
    penalty: tuple[tuple[int, int, int], ...]  # (p, q, coeff) on edges
    chain_costs: tuple[tuple[int, int], ...]  # (d_p^0, d_p^1)
    gadget_costs: tuple[tuple[int, int, tuple[int, int, int, int]], ...]
    # (p, q, (d^00, d^01, d^10, d^11))

    def value(self, assignment: int) -> int:
        total = self.constant
        for p in range(self.n):
            if (assignment >> p) & 1:
                total += self.linear[p]
        for p, q, coeff in self.quadratic:
            if (assignment >> p) & (assignment >> q) & 1:
                total += coeff
        for p, q, coeff in self.penalty:
            if (assignment >> p) & (assignment >> q) & 1:
                total += coeff
        return total


def build_qubo(cl: CrossingLattice, host_bits: int) -> QuboInstance:
    """Distance-to-embedded-state decomposition of one host configuration.

    Chain p contributes d_p^0 + (d_p^1 - d_p^0) n_p, the Hamming distances of
    its path nodes to the two alternating patterns. Each crossing contributes
    the four-term expansion over its gadget-node patterns (kept general: with
    a multi-node gadget the two mixed states need not cost the same).
    """
    n = cl.n_source
    length = cl.chain_len
    sel, unsel = _af_masks(length)
    chain_costs = []
    for p in range(n):
        bits = _chain_bits(cl, p, host_bits)
        chain_costs.append(((bits ^ unsel).bit_count(), (bits ^ sel).bit_count()))
    gadget_costs = []
    for site in cl.crossings:
        if not site.gadgets:
            continue
        p, q = site.pair
        gbits = 0
        for _, gid in site.gadgets:
            if (host_bits >> gid) & 1:
                gbits |= 1 << gid
        costs = []
        for role in ("g00", "g01", "g10", "g11"):
            gid = site.gadget_id(role)
            if gid is None:
                costs.append(0)  # unreachable under the edge penalty
            else:
                costs.append((gbits ^ (1 << gid)).bit_count())
        gadget_costs.append((p, q, tuple(costs)))
    constant = sum(c0 for c0, _ in chain_costs)
    linear = [c1 - c0 for c0, c1 in chain_costs]
    quadratic = []
    penalty_terms = []
    edge_set = set(cl.source.edges)
    cap = 1 + sum(max(c) for c in chain_costs) + sum(
        max(costs) for _, _, costs in gadget_costs
    )
    gcost_by_pair = {(p, q): costs for p, q, costs in gadget_costs}
    for site in cl.crossings:
        p, q = site.pair
        d00, d01, d10, d11 = gcost_by_pair.get((p, q), (0, 0, 0, 0))
        constant += d00
        linear[p] += d10 - d00
        linear[q] += d01 - d00
        if (p, q) in edge_set:
            penalty_terms.append((p, q, cap))
        else:
            coeff = d00 - d01 - d10 + d11
            if coeff:
                quadratic.append((p, q, coeff))
    return QuboInstance(
        n=n,
        constant=constant,
        linear=tuple(linear),
        quadratic=tuple(quadratic),
        penalty=tuple(penalty_terms),
        chain_costs=tuple(chain_costs),
        gadget_costs=tuple(gadget_costs),
    )


def solve_qubo(
    q: QuboInstance, exhaustive_limit: int = 20, node_budget: int = 10**7
) -> tuple[int, int]:
    """Exact minimum of the quadratic form over all 2^n assignments.

    Exhaustive below the limit; otherwise a plain branch and bound with an
    admissible bound from the negative coefficient mass. Among minimizers the
    smallest assignment integer wins.
    """
    if q.n <= exhaustive_limit:
        best_val = None
        best_asg = 0
        for assignment in range(1 << q.n):
            v = q.value(assignment)
            if best_val is None or v < best_val or (v == best_val and assignment < best_asg):
                best_val = v
                best_asg = assignment
        return best_asg, best_val

    neg_by_vertex = [min(0, q.linear[p]) for p in range(q.n)]
    for p_, q_, coeff in list(q.quadratic) + list(q.penalty):
        if coeff < 0:
            neg_by_vertex[q_] += coeff
    suffix_gain = [0] * (q.n + 1)
    for p in range(q.n - 1, -1, -1):
        suffix_gain[p] = suffix_gain[p + 1] + neg_by_vertex[p]
    best = [None, 0]
    nodes = [0]

    def walk(p: int, assignment: int, value: int) -> None:
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetError("qubo search budget exceeded")
        if best[0] is not None and value + suffix_gain[p] >= best[0]:
            if value + suffix_gain[p] > best[0]:
                return
        if p == q.n:
            if best[0] is None or value < best[0] or (value == best[0] and assignment < best[1]):
                best[0] = value
                best[1] = assignment
            return
        walk(p + 1, assignment, value)
        delta = q.linear[p]
        for a, b, coeff in list(q.quadratic) + list(q.penalty):
            if b == p and (assignment >> a) & 1:
                delta += coeff
            elif a == p and (assignment >> b) & 1:
                delta += coeff
        walk(p + 1, assignment | (1 << p), value + delta)

    walk(0, 0, q.constant)
    return best[1], best[0]


def distance_via_mwis_reduction(cl: CrossingLattice, host_bits: int) -> int:
    """Distance by the subgraph shortcut: drop the non-edge quadratic terms,
    keep only chains closer to selected than unselected, and solve one MWIS
    on the induced source subgraph. Exact on the non-planar variant, where no
    gadget nodes exist."""
    q = build_qubo(cl, host_bits)
    gains = [c0 - c1 for c0, c1 in q.chain_costs]
    keep = [p for p in range(q.n) if gains[p] > 0]
    if not keep:
        return q.constant
    index = {p: i for i, p in enumerate(keep)}
    edges = [
        (index[u], index[v])
        for (u, v) in cl.source.edges
        if u in index and v in index
    ]
    sub = make_graph(
        len(keep), edges, [ExactValue(2 * gains[p], 0) for p in keep]
    )
    _, wt = solve_mwis(sub)
    return q.constant - wt.half // 2


def deselect(cl: CrossingLattice, host_bits: int) -> DeselectResult:
    """Declare every chain that is not exactly the selected alternating
    pattern unselected; resolve any surviving source-edge conflict by
    deselecting the higher-index endpoint. Linear in the host size."""
    length = cl.chain_len
    sel, unsel = _af_masks(length)
    source_bits = 0
    deselected = []  # defective chains only; cleanly unselected ones are not defects
    for p in range(cl.n_source):
        bits = _chain_bits(cl, p, host_bits)
        if bits == sel:
            source_bits |= 1 << p
        elif bits != unsel:
            deselected.append(p)
    repaired = []
    for (u, v) in cl.source.edges:
        if (source_bits >> u) & (source_bits >> v) & 1:
            source_bits &= ~(1 << v)  # edges are stored (u, v) with u < v
            repaired.append((u, v))
    _, mis_size = source_mis(cl)
    r = Fraction(source_bits.bit_count(), mis_size)
    return DeselectResult(source_bits, r, tuple(deselected), tuple(repaired))


def deselection_bound_check(
    cl: CrossingLattice,
    host_bits: int,
    e_state: Fraction,
    e_mwis: Fraction,
) -> tuple[Fraction, Fraction, bool]:
    """Exact check of the deselection lower bound for one host state.

    Returns (r_actual, r_bound, ok) with the bound clamped to 0 for
    reporting; ok compares against the unclamped bound.
    """
    result = deselect(cl, host_bits)
    _, mis_size = source_mis(cl)
    bound = 1 - (e_state - e_mwis) / (2 * Fraction(cl.w) * mis_size)
    ok = result.r >= bound
    return result.r, max(bound, Fraction(0)), ok
