"""Generalized independence polynomials over exponents a/2 + b*w.

A polynomial maps lattice exponents to non-negative integer counts, which is
exactly a density of states: the coefficient at exponent x is the number of
independent sets of total weight x. Closed forms for paths, the weighted-path
recurrence, chain-subset polynomials, and the crossing-lattice lower bound
all live here; no floats appear until evaluation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb, exp
from typing import Iterable, Mapping, Union

from .graphs import EV_ONE, EV_ZERO, BudgetError, ExactValue, WeightedGraph, adjacency_masks

__all__ = [
    "GeneralizedPolynomial",
    "a_poly",
    "cl_lower_bound",
    "evaluate_partition",
    "ip_bruteforce",
    "ip_path",
    "ip_weighted_path",
]

_X_HALF_PLUS = ExactValue(1, 1)
_X_HALF_MINUS = ExactValue(1, -1)


class GeneralizedPolynomial:
    """Map from ExactValue exponents to arbitrary-precision counts.

    Zero coefficients are never stored. Addition and multiplication are
    exact; subtraction is only offered in a checked form that rejects
    negative coefficients, since counts must stay non-negative.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Union[Mapping[ExactValue, int], None] = None):
        self.terms: dict[ExactValue, int] = {}
        if terms:
            for exp_, coeff in terms.items():
                if coeff < 0:
                    raise ValueError("coefficients must be non-negative")
                if coeff:
                    self.terms[exp_] = self.terms.get(exp_, 0) + coeff

    @classmethod
    def one(cls) -> "GeneralizedPolynomial":
        return cls({EV_ZERO: 1})

    @classmethod
    def x_pow(cls, exponent: ExactValue, coeff: int = 1) -> "GeneralizedPolynomial":
        return cls({exponent: coeff})

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneralizedPolynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        items = sorted(self.terms.items(), key=lambda kv: (kv[0].half, kv[0].wbias))
        body = " + ".join(f"{c}*x^({e.half}/2+{e.wbias}w)" for e, c in items)
        return f"GeneralizedPolynomial({body or '0'})"

    def __add__(self, other: "GeneralizedPolynomial") -> "GeneralizedPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return GeneralizedPolynomial(out)

    def __mul__(self, other: "GeneralizedPolynomial") -> "GeneralizedPolynomial":
        out: dict[ExactValue, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return GeneralizedPolynomial(out)

    def __pow__(self, k: int) -> "GeneralizedPolynomial":
        if k < 0:
            raise ValueError("negative powers are not defined")
        result = GeneralizedPolynomial.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale_coeffs(self, k: int) -> "GeneralizedPolynomial":
        return GeneralizedPolynomial({e: c * k for e, c in self.terms.items()})

    def sub_nonneg(self, other: "GeneralizedPolynomial") -> "GeneralizedPolynomial":
        """Coefficient-wise difference; raises if any count would go negative."""
        out = dict(self.terms)
        for e, c in other.terms.items():
            r = out.get(e, 0) - c
            if r < 0:
                raise ValueError(f"subtraction drives coefficient at {e} below zero")
            if r:
                out[e] = r
            else:
                out.pop(e, None)
        return GeneralizedPolynomial(out)

    def leq_coefficientwise(self, other: "GeneralizedPolynomial") -> bool:
        return all(c <= other.terms.get(e, 0) for e, c in self.terms.items())

    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    def coefficient(self, exponent: ExactValue) -> int:
        return self.terms.get(exponent, 0)

    def sorted_terms(self, w: Fraction) -> list[tuple[ExactValue, int]]:
        """Terms sorted by exponent value at a concrete w (exact comparison)."""
        return sorted(self.terms.items(), key=lambda kv: kv[0].value(w))

    def max_exponent(self, w: Fraction) -> ExactValue:
        if not self.terms:
            raise ValueError("empty polynomial has no degree")
        return max(self.terms, key=lambda e: e.value(w))


def ip_path(n: int) -> GeneralizedPolynomial:
    """Independence polynomial of the unweighted path P_n, in closed form.

    The count of k-vertex independent sets of P_n is C(n-k+1, k); the sum
    runs up to floor((n+1)/2).
    """
    if n < 0:
        raise ValueError("path length must be non-negative")
    terms = {}
    for k in range((n + 1) // 2 + 1):
        c = comb(n - k + 1, k)
        if c:
            terms[EV_ONE.scaled(k)] = c
    return GeneralizedPolynomial(terms)


def ip_weighted_path(n_half: int) -> GeneralizedPolynomial:
    """Independence polynomial of P_{2N} carrying the end-biased profile.

    The four cases of which endpoints are selected give
    IP(P_{2N-2}) + x^(1/2)(x^w + x^(-w)) IP(P_{2N-3}) + x IP(P_{2N-4});
    exponents stay symbolic in w, so no concrete bias is needed.
    """
    if n_half < 0:
        raise ValueError("N must be non-negative")
    if n_half == 0:
        return GeneralizedPolynomial.one()
    if n_half == 1:
        # P_2 with weights 1/2+w, 1/2-w.
        return GeneralizedPolynomial(
            {EV_ZERO: 1, _X_HALF_PLUS: 1, _X_HALF_MINUS: 1}
        )
    n = 2 * n_half
    ends = GeneralizedPolynomial({_X_HALF_PLUS: 1, _X_HALF_MINUS: 1})
    return (
        ip_path(n - 2)
        + ends * ip_path(n - 3)
        + GeneralizedPolynomial.x_pow(EV_ONE) * ip_path(n - 4)
    )


def a_poly(n: int, sign: int) -> GeneralizedPolynomial:
    """Subset polynomial (1 + x^(1/2 +- w)) (1 + x)^n of a chain side.

    Counts all subsets of the selected (sign=+1) or unselected (sign=-1)
    antiferromagnetic configuration of a weighted chain with n interior
    vertices on that side.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    end = _X_HALF_PLUS if sign == 1 else _X_HALF_MINUS
    binom = GeneralizedPolynomial(
        {EV_ONE.scaled(k): comb(n, k) for k in range(n + 1)}
    )
    return GeneralizedPolynomial({EV_ZERO: 1, end: 1}) * binom


def _iter_is_weights(g: WeightedGraph, max_states: int = 10**7):
    """Yield (bits, half, wbias) for every independent set of an exact graph.

    Straight include/exclude backtracking on vertex index order; independent
    of the solver module so the two can cross-check each other.
    """
    if not g.is_exact:
        raise ValueError("independence polynomials require exact weights")
    adj = adjacency_masks(g)
    halves = [x.half for x in g.weights]
    biases = [x.wbias for x in g.weights]
    full = (1 << g.n) - 1
    emitted = 0
    stack = [(0, full, 0, 0, 0)]
    while stack:
        i, mask, bits, a, b = stack.pop()
        while i < g.n and not (mask >> i) & 1:
            i += 1
        if i >= g.n:
            emitted += 1
            if emitted > max_states:
                raise BudgetError("independent-set enumeration budget exceeded")
            yield bits, a, b
            continue
        bit = 1 << i
        stack.append((i + 1, mask & ~bit, bits, a, b))
        stack.append(
            (i + 1, mask & ~(adj[i] | bit), bits | bit, a + halves[i], b + biases[i])
        )


def ip_bruteforce(g: WeightedGraph, max_states: int = 10**7) -> GeneralizedPolynomial:
    """Exact independence polynomial by complete enumeration of IS(g)."""
    terms: dict[ExactValue, int] = {}
    for _, a, b in _iter_is_weights(g, max_states):
        e = ExactValue(a, b)
        terms[e] = terms.get(e, 0) + 1
    return GeneralizedPolynomial(terms)


def cl_lower_bound(
    g: WeightedGraph, variant: str = "nonplanar", max_states: int = 10**6
) -> GeneralizedPolynomial:
    """Lower bound on the host density of states of a crossing lattice.

    Sums, over every independent set S of the N-vertex source graph,
    (IP(P_{2N+2}, W_w) - A_{N,-})^|S| * A_{N,-}^(N-|S|): chains embedding a
    selected vertex range over all their configurations except fully
    unselected subsets, the rest stay within unselected subsets. With
    variant="gadget_factors" the result is further multiplied by
    (1+x)^|E| (1+x^2)^(C(N,2)-|E|), one factor per crossing site.
    """
    if variant not in ("nonplanar", "gadget_factors"):
        raise ValueError(f"unknown variant {variant!r}")
    n = g.n
    chain = ip_weighted_path(n + 1)  # P_{2N+2}
    a_minus = a_poly(n, -1)
    selected_part = chain.sub_nonneg(a_minus)
    size_counts: dict[int, int] = {}
    for bits, _, _ in _iter_is_weights(g, max_states):
        k = bits.bit_count()
        size_counts[k] = size_counts.get(k, 0) + 1
    total = GeneralizedPolynomial()
    for k, count in sorted(size_counts.items()):
        term = (selected_part**k) * (a_minus ** (n - k))
        total = total + term.scale_coeffs(count)
    if variant == "gadget_factors":
        n_edges = len(g.edges)
        with_edge = GeneralizedPolynomial({EV_ZERO: 1, EV_ONE: 1})
        without_edge = GeneralizedPolynomial({EV_ZERO: 1, EV_ONE.scaled(2): 1})
        total = total * (with_edge**n_edges)
        total = total * (without_edge ** (n * (n - 1) // 2 - n_edges))
    return total


def evaluate_partition(p: GeneralizedPolynomial, beta: float, w) -> float:
    """Boltzmann sum over weights: sum of coeff * exp(-beta * exponent(w))."""
    wf = float(w)
    return sum(c * exp(-beta * (e.half / 2.0 + e.wbias * wf)) for e, c in p.terms.items())


def poly_to_obj(p: GeneralizedPolynomial, w: Fraction) -> list[dict]:
    return [
        {"half": e.half, "w": e.wbias, "count": str(c)}
        for e, c in p.sorted_terms(w)
    ]


def poly_from_obj(items: Iterable[dict]) -> GeneralizedPolynomial:
    terms = {}
    for item in items:
        e = ExactValue(int(item["half"]), int(item["w"]))
        terms[e] = terms.get(e, 0) + int(item["count"])
    return GeneralizedPolynomial(terms)


def write_poly(p: GeneralizedPolynomial, w: Fraction, path, header=None) -> None:
    obj = {"terms": poly_to_obj(p, w)}
    if header is not None:
        obj["header"] = header
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")
