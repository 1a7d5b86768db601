"""Even-edge subdivision embedding and its odd-cycle failure mode.

Replacing an edge by an even-length path preserves the exclusion between its
endpoints only while the inserted path alternates; a domain wall inside the
path lets both original endpoints be selected at once. Interpretation is by
contraction: original vertices keep their selection, and any source edge
whose endpoints both survive is recorded as a violation and repaired by
deselecting the higher-index endpoint.

Unweighted subdivided hosts of odd cycles keep a degenerate optimum where
walled fillings tie the alternating ones, so violations appear with constant
probability per cycle. The optional wire profile (ends 1 +- 2w, interior 2)
prices inserted vertices above originals, which removes violating optima and
lifts the wall degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .graphs import (
    EV_ONE,
    ExactValue,
    WeightedGraph,
    make_graph,
)
from .paths import domain_walls
from .solver import SearchBudget, enumerate_low_energy, solve_mwis

__all__ = [
    "PathologyReport",
    "SubdivisionEmbedding",
    "contract_interpret",
    "odd_cycle_pathology",
    "segment_walls",
    "subdivide",
    "wire_weights",
]


@dataclass(frozen=True)
class SubdivisionEmbedding:
    source: WeightedGraph
    host: WeightedGraph
    # per subdivided edge: ((u, v), inserted host ids in path order u -> v)
    inserted: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]
    weighted: bool
    w: Union[Fraction, None]

    def subdivided_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(edge for edge, _ in self.inserted)


def wire_weights(count: int, w: Fraction) -> tuple[ExactValue, ...]:
    """Profile on an inserted path: 1+2w, 2, ..., 2, 1-2w.

    The doubled scale makes one inserted vertex outweigh one original, so a
    violating optimum (both endpoints kept at the price of a wall) always
    loses to trading an endpoint for the extra inserted vertex.
    """
    if count < 2 or count % 2:
        raise ValueError("wire profiles need an even count >= 2")
    ws = [ExactValue(4, 0)] * count
    ws[0] = ExactValue(2, 2)
    ws[-1] = ExactValue(2, -2)
    return tuple(ws)


def subdivide(
    g: WeightedGraph,
    edge_plan: Mapping[tuple[int, int], int],
    w: Union[Fraction, None] = None,
) -> SubdivisionEmbedding:
    """Insert an even number of vertices into each planned edge.

    edge_plan maps source edges to the number of inserted vertices (even,
    possibly 0). Passing w applies the wire profile to every inserted path;
    original vertices always keep weight 1.
    """
    edge_set = set(g.edges)
    plan = {}
    for raw_edge, count in edge_plan.items():
        u, v = raw_edge
        edge = (u, v) if u < v else (v, u)
        if edge not in edge_set:
            raise ValueError(f"edge {raw_edge} not in the source graph")
        if count < 0 or count % 2:
            raise ValueError(f"edge {raw_edge}: inserted count must be even >= 0")
        plan[edge] = count
    if w is not None:
        w = Fraction(w)
    edges: list[tuple[int, int]] = []
    weights: list[ExactValue] = [EV_ONE] * g.n
    inserted = []
    next_id = g.n
    for edge in g.edges:
        count = plan.get(edge, 0)
        if count == 0:
            edges.append(edge)
            continue
        u, v = edge
        ids = tuple(range(next_id, next_id + count))
        next_id += count
        chain = [u, *ids, v]
        edges.extend((chain[i], chain[i + 1]) for i in range(len(chain) - 1))
        weights.extend(wire_weights(count, w) if w is not None else [EV_ONE] * count)
        inserted.append((edge, ids))
    host = make_graph(next_id, edges, tuple(weights), name=f"subdiv-{g.name or 'graph'}")
    return SubdivisionEmbedding(g, host, tuple(inserted), w is not None, w)


def segment_walls(se: SubdivisionEmbedding, host_bits: int) -> dict[tuple[int, int], tuple[int, ...]]:
    """Adjacent-unselected positions along each subdivided segment.

    The segment includes both original endpoints; position i refers to the
    pair (segment[i], segment[i+1]). A wall-free segment propagates the
    endpoint exclusion, so violations require a wall.
    """
    out = {}
    for edge, ids in se.inserted:
        u, v = edge
        segment = [u, *ids, v]
        bits = 0
        for k, vertex in enumerate(segment):
            if (host_bits >> vertex) & 1:
                bits |= 1 << k
        out[edge] = domain_walls(bits, len(segment))
    return out


def contract_interpret(
    se: SubdivisionEmbedding, host_bits: int
) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Contract inserted paths and repair independence violations.

    Returns (repaired source bits, violated source edges). A violation is a
    subdivided edge with both original endpoints selected; its higher-index
    endpoint is deselected, so the result is always an independent set of
    the source.
    """
    source_bits = host_bits & ((1 << se.source.n) - 1)
    violations = []
    for edge, _ in se.inserted:
        u, v = edge
        if (source_bits >> u) & (source_bits >> v) & 1:
            violations.append(edge)
            source_bits &= ~(1 << v)
    return source_bits, tuple(violations)


@dataclass(frozen=True)
class PathologyReport:
    cycles: int
    host_mis_count: int
    single_cycle_violation_probability: Fraction
    expected_violations: Fraction
    wall_probability: Fraction  # chance a cycle's segment carries a wall

    def matches_additivity(self) -> bool:
        return (
            self.expected_violations
            == self.cycles * self.single_cycle_violation_probability
        )


def _triangle_family(k: int) -> tuple[WeightedGraph, dict[tuple[int, int], int]]:
    # k disjoint triangles, one edge of each subdivided by two vertices
    edges = []
    plan = {}
    for c in range(k):
        a, b, d = 3 * c, 3 * c + 1, 3 * c + 2
        edges.extend([(a, b), (b, d), (a, d)])
        plan[(a, b)] = 2
    return make_graph(3 * k, edges, name=f"triangles-{k}"), plan


def odd_cycle_pathology(
    k: int,
    w: Union[Fraction, None] = None,
    budget: Union[SearchBudget, None] = None,
) -> PathologyReport:
    """Exact violation statistics for k disjoint subdivided odd cycles.

    The reference family is k vertex-disjoint triangles, each with one edge
    subdivided into a five-cycle. All maximum independent sets of the host
    are enumerated exactly; the report carries the per-cycle violation
    probability under a uniformly random optimum and the expected number of
    violations, both as exact rationals.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if budget is None:
        budget = SearchBudget()
    g, plan = _triangle_family(k)
    se = subdivide(g, plan, w)
    _, w_max = solve_mwis(se.host, w, budget)
    records = enumerate_low_energy(se.host, Fraction(0), w, budget)
    total = len(records)
    violation_sum = 0
    walled = 0
    for rec in records:
        _, violations = contract_interpret(se, rec.bits)
        violation_sum += len(violations)
        walls = segment_walls(se, rec.bits)
        walled += sum(1 for positions in walls.values() if positions)
    expected = Fraction(violation_sum, total)
    wall_prob = Fraction(walled, k * total)
    # per-cycle probability from the k=1 member of the same family
    if k == 1:
        single = expected
    else:
        single = odd_cycle_pathology(1, w, budget).single_cycle_violation_probability
    return PathologyReport(
        cycles=k,
        host_mis_count=total,
        single_cycle_violation_probability=single,
        expected_violations=expected,
        wall_probability=wall_prob,
    )
