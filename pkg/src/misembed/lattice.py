"""Crossing-lattice hosts: N weighted chains, one per problem vertex, coupled
pairwise at N(N-1)/2 crossing sites.

Two variants are built from the same chain skeleton:

* non-planar: each problem edge becomes one direct edge between odd vertices
  of the two chains; crossings without an edge carry nothing.
* gadgeted: every crossing carries a small clique. A crossing without a
  problem edge gets a 4-clique (roles g00, g01, g10, g11, weight 2 each); a
  crossing with an edge gets a 3-clique (g00, g01, g10, weight 1 each). The
  vertex g_ab is wired to the flanking odd vertices of chain p when a=0 and
  to the flanking even vertices when a=1 (same for b on chain q), so exactly
  the one vertex matching the two chain states is unblocked in any
  interpretable configuration.

Chain p occupies host ids [p*L, (p+1)*L) with L = 2N+2; gadget ids follow.
Crossing (p, q) with p < q sits at slot q on chain p and slot p+1 on chain q
(slots are 1-based; slot k flanks odd vertices v_{2k-1}, v_{2k+1} and even
vertices v_{2k}, v_{2k+2}), which uses every slot 1..N-1 of every chain
exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .graphs import (
    EV_ONE,
    ContractError,
    ExactValue,
    WeightedGraph,
    is_independent,
    iter_independent_sets,
    make_graph,
    total_weight,
)
from .paths import DefectReport, alternating_masks, domain_walls, path_profile_weights, penalty

__all__ = [
    "CrossingLattice",
    "CrossingSite",
    "InterpretResult",
    "block_distance",
    "build_gadgeted_cl",
    "build_nonplanar_cl",
    "calibrate_gadget_contract",
    "embed",
    "interpret",
    "modified_cl_profile",
]

_ROLES = ("g00", "g01", "g10", "g11")


@dataclass(frozen=True)
class CrossingSite:
    pair: tuple[int, int]  # (p, q), p < q, 0-based problem vertices
    kind: str  # "with_edge" | "without_edge"
    gadgets: tuple[tuple[str, int], ...]  # (role, host id)
    slot_p: int  # 1-based slot on chain p
    slot_q: int  # 1-based slot on chain q
    b_e: int

    def gadget_id(self, role: str) -> Union[int, None]:
        for r, i in self.gadgets:
            if r == role:
                return i
        return None


@dataclass(frozen=True)
class CrossingLattice:
    source: WeightedGraph
    variant: str  # "nonplanar" | "gadgeted"
    w: Fraction
    host: WeightedGraph
    chains: tuple[tuple[int, ...], ...]
    crossings: tuple[CrossingSite, ...]
    vertex_blocks: tuple[int, ...]  # b_e of the block holding each host vertex

    @property
    def n_source(self) -> int:
        return self.source.n

    @property
    def chain_len(self) -> int:
        return 2 * self.source.n + 2


@dataclass(frozen=True)
class InterpretResult:
    """Outcome of reading a host configuration back through the embedding."""

    source_bits: Union[int, None]  # None when not interpretable
    chain_reports: tuple[DefectReport, ...]
    chain_states: tuple[str, ...]  # "selected" | "unselected" | "defect"
    gadget_canonical: bool

    @property
    def interpretable(self) -> bool:
        return self.source_bits is not None


def _slot_on_chain(c: int, other: int) -> int:
    # 1-based slot of the crossing with `other` along chain c; bijective onto
    # 1..N-1 for each chain.
    return other if other > c else other + 1


def block_distance_cell(row: int, col: int, n: int) -> int:
    """Chebyshev distance of 1-based grid cell (row, col) to the nearer of the
    two diagonal endpoint cells (1,1) and (N,N)."""
    return min(max(row, col) - 1, n - min(row, col))


def block_distance(cl_or_n: Union[CrossingLattice, int], site: CrossingSite) -> int:
    n = cl_or_n if isinstance(cl_or_n, int) else cl_or_n.n_source
    p, q = site.pair
    return block_distance_cell(p + 1, q + 1, n)


def _build(g: WeightedGraph, w, variant: str) -> CrossingLattice:
    if not g.is_exact or any(x != EV_ONE for x in g.weights):
        raise ValueError("crossing lattices embed unweighted source graphs")
    w = Fraction(w)
    if not 0 < w <= 1:
        raise ValueError("w must lie in (0, 1]")
    n = g.n
    length = 2 * n + 2
    chains = tuple(tuple(range(p * length, (p + 1) * length)) for p in range(n))
    edges: list[tuple[int, int]] = []
    weights: list[ExactValue] = []
    blocks: list[int] = []
    for p in range(n):
        base = p * length
        edges.extend((base + j, base + j + 1) for j in range(length - 1))
        weights.extend(path_profile_weights(length))
        for j in range(length):
            if j == 0 or j == length - 1:
                blocks.append(0)  # boundary blocks keep the weight biases unscaled
            else:
                blocks.append(block_distance_cell(p + 1, (j + 1) // 2, n))
    edge_set = set(g.edges)
    next_id = n * length
    crossings = []
    for p in range(n):
        for q in range(p + 1, n):
            kind = "with_edge" if (p, q) in edge_set else "without_edge"
            slot_p = _slot_on_chain(p, q)
            slot_q = _slot_on_chain(q, p)
            b_e = block_distance_cell(p + 1, q + 1, n)
            gadgets: tuple[tuple[str, int], ...] = ()
            if variant == "nonplanar":
                if kind == "with_edge":
                    # one direct edge between the first flanking odd vertices
                    edges.append(
                        (chains[p][2 * slot_p - 2], chains[q][2 * slot_q - 2])
                    )
            else:
                roles = _ROLES[:3] if kind == "with_edge" else _ROLES
                gweight = EV_ONE if kind == "with_edge" else ExactValue(4, 0)
                ids = []
                for role in roles:
                    gid = next_id
                    next_id += 1
                    ids.append((role, gid))
                    weights.append(gweight)
                    blocks.append(b_e)
                    a = int(role[1])
                    b = int(role[2])
                    for chain, slot, side in ((p, slot_p, a), (q, slot_q, b)):
                        if side == 0:
                            flanks = (2 * slot - 2, 2 * slot)  # odd vertices
                        else:
                            flanks = (2 * slot - 1, 2 * slot + 1)  # even vertices
                        for j in flanks:
                            edges.append((chains[chain][j], gid))
                for i in range(len(ids)):
                    for j in range(i + 1, len(ids)):
                        edges.append((ids[i][1], ids[j][1]))
                gadgets = tuple(ids)
            crossings.append(
                CrossingSite(
                    pair=(p, q),
                    kind=kind,
                    gadgets=gadgets,
                    slot_p=slot_p,
                    slot_q=slot_q,
                    b_e=b_e,
                )
            )
    host = make_graph(
        next_id,
        edges,
        tuple(weights),
        name=f"{variant}-cl-{g.name or 'graph'}",
    )
    return CrossingLattice(
        source=g,
        variant=variant,
        w=w,
        host=host,
        chains=chains,
        crossings=tuple(crossings),
        vertex_blocks=tuple(blocks),
    )


def build_nonplanar_cl(g: WeightedGraph, w) -> CrossingLattice:
    """Gadget-free variant: problem edges inserted directly between chains."""
    return _build(g, w, "nonplanar")


def build_gadgeted_cl(g: WeightedGraph, w) -> CrossingLattice:
    """Reference gadgeted variant; see calibrate_gadget_contract for the
    functional contract it is checked against."""
    return _build(g, w, "gadgeted")


@lru_cache(maxsize=256)
def _af_masks(length: int) -> tuple[int, int]:
    return alternating_masks(length)


def _chain_bits(cl: CrossingLattice, p: int, host_bits: int) -> int:
    length = cl.chain_len
    return (host_bits >> (p * length)) & ((1 << length) - 1)


def canonical_gadget_bits(cl: CrossingLattice, source_bits: int) -> int:
    """Gadget selection matching the chain states of an embedded source set."""
    out = 0
    for site in cl.crossings:
        if not site.gadgets:
            continue
        p, q = site.pair
        role = f"g{(source_bits >> p) & 1}{(source_bits >> q) & 1}"
        gid = site.gadget_id(role)
        if gid is None:
            raise ValueError(
                f"crossing {site.pair} has no gadget state for {role}; "
                "the source set is not independent"
            )
        out |= 1 << gid
    return out


def embed(cl: CrossingLattice, source_bits: int) -> int:
    """Embedding map: selected chains alternate from the biased end, the rest
    alternate from the light end, gadgets take their matching vertex."""
    if not is_independent(cl.source, source_bits):
        raise ValueError("embed requires an independent source configuration")
    length = cl.chain_len
    sel, unsel = _af_masks(length)
    bits = 0
    for p in range(cl.n_source):
        pattern = sel if (source_bits >> p) & 1 else unsel
        bits |= pattern << (p * length)
    return bits | canonical_gadget_bits(cl, source_bits)


def interpret(cl: CrossingLattice, host_bits: int) -> InterpretResult:
    """Inverse map, defined exactly on embedded configurations.

    A host state is interpretable when every chain is one of the two
    alternating states, the selected chains form an independent set of the
    source, and every gadget carries its matching vertex.
    """
    length = cl.chain_len
    sel, unsel = _af_masks(length)
    states = []
    reports = []
    source_bits = 0
    defect = False
    for p in range(cl.n_source):
        bits = _chain_bits(cl, p, host_bits)
        if bits == sel:
            states.append("selected")
            source_bits |= 1 << p
            reports.append(DefectReport(()))
        elif bits == unsel:
            states.append("unselected")
            reports.append(DefectReport(()))
        else:
            states.append("defect")
            defect = True
            reports.append(DefectReport(domain_walls(bits, length)))
    gadget_ok = True
    if not defect:
        if is_independent(cl.source, source_bits):
            gadget_ok = embed(cl, source_bits) == host_bits
        else:
            gadget_ok = False
    if defect or not gadget_ok:
        return InterpretResult(None, tuple(reports), tuple(states), gadget_ok)
    return InterpretResult(source_bits, tuple(reports), tuple(states), True)


def interpretable_states(cl: CrossingLattice) -> list[tuple[int, int]]:
    """All (source_bits, host_bits) pairs, sorted by source bits."""
    return [
        (s, embed(cl, s)) for s in sorted(iter_independent_sets(cl.source))
    ]


def modified_cl_profile(cl: CrossingLattice, mu: float, nu: float) -> WeightedGraph:
    """Float-weight host with every vertex scaled by penalty(b_e of its block).

    Interior chain vertices pair off inside their block across the
    alternation and the 1/2 +- w ends sit in b_e = 0 boundary blocks, so the
    interpretable ladder keeps its exact 2w spacing for every (mu, nu), and
    all vertices of a gadget share one factor. mu=0, nu=1 returns the exact
    host unchanged.
    """
    if mu == 0 and nu == 1:
        return cl.host
    wf = float(cl.w)
    weights = []
    for i in range(cl.host.n):
        base = cl.host.weights[i].value(wf)
        weights.append(base * penalty(cl.vertex_blocks[i], mu, nu))
    return make_graph(cl.host.n, cl.host.edges, weights, name=cl.host.name)


def calibrate_gadget_contract(cl: CrossingLattice, budget=None) -> None:
    """Verify the construction contract of a gadgeted lattice, exhaustively.

    G1: the host optima are exactly the embedded source optima.
    G2: embedded weights form the ladder base + 2w|S| over S in IS(source).
    G3: each crossing contributes a constant gadget weight (2 or 1) across
        all interpretable states.
    G4: the cheapest non-interpretable state sits exactly 1/2 - w above the
        optimum whenever some vertex lies outside some maximum independent
        set (with no such vertex the cheapest defect costs 1/2 + w).

    Raises ContractError on any violation. Exhaustive enumeration; intended
    for small sources.
    """
    from .solver import DEFAULT_BUDGET, enumerate_low_energy, solve_mwis

    if budget is None:
        budget = DEFAULT_BUDGET
    w = cl.w
    source_sets = sorted(iter_independent_sets(cl.source))
    embedded = {s: embed(cl, s) for s in source_sets}
    weights = {s: total_weight(cl.host, h) for s, h in embedded.items()}
    base = weights[0]
    two_w = ExactValue(0, 2)
    # G2: ladder spacing
    for s, wt in weights.items():
        expect = base + two_w.scaled(s.bit_count())
        if wt != expect:
            raise ContractError(
                f"ladder violated at source set {s:#x}: weight {wt}, expected {expect}"
            )
    # G3: constant gadget contribution per crossing
    for site in cl.crossings:
        if not site.gadgets:
            continue
        expected = ExactValue(4, 0) if site.kind == "without_edge" else EV_ONE
        gmask = 0
        for _, gid in site.gadgets:
            gmask |= 1 << gid
        for s, h in embedded.items():
            contrib = total_weight(cl.host, h & gmask)
            if contrib != expected:
                raise ContractError(
                    f"crossing {site.pair} contributes {contrib} in state {s:#x}"
                )
    # G1: host optima == embedded source optima
    _, w_max = solve_mwis(cl.host, w, budget)
    opt_states = {r.bits for r in enumerate_low_energy(cl.host, Fraction(0), w, budget)}
    mis_weight = max(wt.value(w) for wt in weights.values())
    expected_opt = {
        h for s, h in embedded.items() if weights[s].value(w) == mis_weight
    }
    if opt_states != expected_opt:
        raise ContractError("host optima differ from embedded source optima")
    if w_max.value(w) != mis_weight:
        raise ContractError("host optimal weight differs from best embedded weight")
    # G4: cheapest defect
    has_outside_vertex = bool(cl.source.edges)
    threshold = Fraction(1, 2) - w if has_outside_vertex else Fraction(1, 2) + w
    window = Fraction(1, 2) + w
    records = enumerate_low_energy(cl.host, window, w, budget)
    interpretable = set(embedded.values())
    best_defect = None
    for rec in records:
        if rec.bits in interpretable:
            continue
        de = w_max.value(w) - rec.weight.value(w)
        if best_defect is None or de < best_defect:
            best_defect = de
    if best_defect != threshold:
        raise ContractError(
            f"cheapest non-interpretable state at {best_defect}, expected {threshold}"
        )
