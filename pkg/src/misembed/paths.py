"""Even paths with the end-biased weight profile: the elementary embedding.

A single problem vertex embeds into P_{2N} as one of the two alternating
(antiferromagnetic) configurations; the profile gives the first vertex
1/2 + w, the last 1/2 - w and interior vertices 1, so the two alternating
states differ by exactly 2w and every domain wall costs energy. Domain-wall
detection and per-path Hamming distances are the primitives reused by the
crossing-lattice modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .graphs import EV_ONE, ExactValue, WeightedGraph, make_graph

__all__ = [
    "DefectReport",
    "PathEmbedding",
    "build_path_embedding",
    "domain_walls",
    "find_domain_walls",
    "modified_path_profile",
    "path_distance",
    "path_profile_weights",
    "penalty",
]


@dataclass(frozen=True)
class DefectReport:
    """Domain walls of one path: 0-based positions i with both i, i+1 unselected."""

    wall_positions: tuple[int, ...]

    @property
    def wall_count(self) -> int:
        return len(self.wall_positions)


@dataclass(frozen=True)
class PathEmbedding:
    """Host path P_{2N} with the end-biased profile and its two code states."""

    n_half: int
    w: Fraction
    host: WeightedGraph
    f_selected: int  # odd vertices v1, v3, ... (bit 0 set)
    f_unselected: int  # even vertices v2, v4, ...

    @property
    def length(self) -> int:
        return 2 * self.n_half

    def soft_ordering(self) -> bool:
        """True when w >= 1/2, where some defects stop costing energy."""
        return self.w >= Fraction(1, 2)


def path_profile_weights(length: int) -> tuple[ExactValue, ...]:
    """End-biased profile on a path of even length: 1/2+w, 1, ..., 1, 1/2-w."""
    if length < 2 or length % 2:
        raise ValueError("profile is defined for even paths of length >= 2")
    ws = [EV_ONE] * length
    ws[0] = ExactValue(1, 1)
    ws[-1] = ExactValue(1, -1)
    return tuple(ws)


def alternating_masks(length: int) -> tuple[int, int]:
    """(selected, unselected) alternating bitmasks for a path of even length."""
    sel = 0
    for i in range(0, length, 2):
        sel |= 1 << i
    return sel, sel << 1


def build_path_embedding(n_half: int, w) -> PathEmbedding:
    """Path host P_{2N} with the biased profile embedding a single vertex.

    Accepts w in (0, 1]; above 1/2 the weight ordering of defects softens
    (flagged via soft_ordering) but the structure is unchanged.
    """
    if n_half < 1:
        raise ValueError("N must be >= 1")
    w = Fraction(w)
    if not 0 < w <= 1:
        raise ValueError("w must lie in (0, 1]")
    length = 2 * n_half
    host = make_graph(
        length,
        [(i, i + 1) for i in range(length - 1)],
        path_profile_weights(length),
        name=f"path-{length}",
    )
    sel, unsel = alternating_masks(length)
    return PathEmbedding(n_half, w, host, sel, unsel)


def domain_walls(bits: int, length: int, offset: int = 0) -> tuple[int, ...]:
    """Positions i (0-based, relative) where vertices i and i+1 are both unselected."""
    u = ~(bits >> offset) & ((1 << length) - 1)
    pairs = u & (u >> 1) & ((1 << (length - 1)) - 1)
    out = []
    while pairs:
        lsb = pairs & -pairs
        out.append(lsb.bit_length() - 1)
        pairs ^= lsb
    return tuple(out)


def find_domain_walls(pe_or_length: Union[PathEmbedding, int], s: int) -> DefectReport:
    """All adjacent-unselected positions of an independent path configuration.

    Among independent sets, zero walls is equivalent to being one of the two
    alternating states, so this is the path interpretability test.
    """
    length = pe_or_length.length if isinstance(pe_or_length, PathEmbedding) else pe_or_length
    return DefectReport(domain_walls(s, length))


def path_distance(pe: PathEmbedding, s: int) -> tuple[int, str]:
    """Minimum Hamming distance to the two alternating states.

    Returns (d, which) with which in {"selected", "unselected", "tie"}.
    """
    d_sel = (s ^ pe.f_selected).bit_count()
    d_unsel = (s ^ pe.f_unselected).bit_count()
    if d_sel < d_unsel:
        return d_sel, "selected"
    if d_unsel < d_sel:
        return d_unsel, "unselected"
    return d_sel, "tie"


def penalty(n: int, mu: float, nu: float) -> float:
    """Defect-penalty modulation (n+1)^mu * nu^n applied to weight profiles."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    return (n + 1) ** mu * nu**n


def endpoint_distance(i: int, length: int) -> int:
    """Hops from vertex i (0-based) to the nearest endpoint of the path."""
    return min(i, length - 1 - i)


def modified_path_profile(pe: PathEmbedding, mu: float, nu: float) -> WeightedGraph:
    """Float-weight host scaling each vertex by penalty(endpoint distance).

    Both endpoints sit at distance 0, so the 1/2 +- w biases are never
    rescaled; interior vertices at matched distances pair off across the
    alternation, which keeps the selected/unselected gap at exactly 2w for
    every (mu, nu). mu=0, nu=1 returns the exact host unchanged.
    """
    if mu == 0 and nu == 1:
        return pe.host
    length = pe.length
    wf = float(pe.w)
    weights = []
    for i in range(length):
        base = pe.host.weights[i].value(wf)
        weights.append(base * penalty(endpoint_distance(i, length), mu, nu))
    sel_w = sum(weights[i] for i in range(0, length, 2))
    unsel_w = sum(weights[i] for i in range(1, length, 2))
    if not sel_w > unsel_w:
        raise ValueError("modified profile lost the alternating-state ordering")
    return make_graph(length, pe.host.edges, weights, name=pe.host.name)
