"""Core graph types: exact lattice-valued weights, bit-vector configurations,
simple weighted graphs, seeded random instances, and JSON serialization.

Weights and energies live on the lattice {a/2 + b*w : a, b integers} so that
all bookkeeping stays exact; a concrete rational ``w`` is only needed to
order or evaluate values. Configurations are plain ints (vertex i = bit i).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

__all__ = [
    "BudgetError",
    "Configuration",
    "ContractError",
    "ExactValue",
    "GraphFormatError",
    "WeightMode",
    "WeightedGraph",
    "Xoshiro256StarStar",
    "adjacency_masks",
    "all_weights_one",
    "is_independent",
    "random_gnp",
    "read_graph",
    "total_weight",
    "weight_value",
    "write_graph",
]


class GraphFormatError(ValueError):
    """Raised for malformed graph/embedding files; message names the field."""


class BudgetError(RuntimeError):
    """Raised when a configured search/enumeration budget is exhausted."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ContractError(RuntimeError):
    """Raised when an embedding construction fails its self-calibration."""


# ---------------------------------------------------------------------------
# Exact lattice values


@dataclass(frozen=True)
class ExactValue:
    """A value half/2 + wbias*w, with integer coefficients.

    Arithmetic is exact and closed on the lattice. Ordering requires a
    concrete rational w; two values are exactly equal only when both
    coefficients match.
    """

    half: int
    wbias: int = 0

    def __add__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(self.half + other.half, self.wbias + other.wbias)

    def __sub__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(self.half - other.half, self.wbias - other.wbias)

    def __neg__(self) -> "ExactValue":
        return ExactValue(-self.half, -self.wbias)

    def scaled(self, k: int) -> "ExactValue":
        return ExactValue(self.half * k, self.wbias * k)

    def value(self, w) -> Union[Fraction, float]:
        """Evaluate at a concrete w (Fraction keeps the result exact)."""
        if isinstance(w, Fraction):
            return Fraction(self.half, 2) + self.wbias * w
        return self.half / 2.0 + self.wbias * w

    def is_zero(self) -> bool:
        return self.half == 0 and self.wbias == 0

    def __repr__(self) -> str:
        return f"ExactValue({self.half}, {self.wbias})"


EV_ZERO = ExactValue(0, 0)
EV_ONE = ExactValue(2, 0)

Weight = Union[ExactValue, float]


def weight_value(weight: Weight, w=None):
    """Numeric value of a weight; exact weights need a concrete w when biased."""
    if isinstance(weight, ExactValue):
        if weight.wbias and w is None:
            raise ValueError("a concrete w is required to evaluate a biased weight")
        return weight.value(w if w is not None else Fraction(0))
    return weight


@dataclass(frozen=True)
class WeightMode:
    """Arithmetic mode of a run: exact lattice weights or floats.

    Exact mode requires the unmodified profile (mu=0, nu=1); the modified
    profiles multiply weights by (n+1)^mu * nu^n, which leaves the lattice.
    """

    kind: str  # "exact" | "float"
    w: Union[Fraction, float]
    mu: float = 0.0
    nu: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exact", "float"):
            raise ValueError(f"unknown weight mode {self.kind!r}")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.nu < 1:
            raise ValueError("nu must be >= 1")
        if self.kind == "exact":
            if self.mu != 0 or self.nu != 1:
                raise ValueError("exact mode requires mu=0, nu=1")
            if not isinstance(self.w, Fraction):
                object.__setattr__(self, "w", Fraction(self.w))


# ---------------------------------------------------------------------------
# Graphs


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with per-vertex weights.

    Edges are canonicalized to sorted (u, v) pairs with u < v. Weights are
    either all ExactValue (exact mode) or all floats (float mode); the
    default is weight 1 on every vertex. Instances are immutable and safe
    to share.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[Weight, ...]
    name: Union[str, None] = None

    def __post_init__(self):
        if self.n < 0:
            raise GraphFormatError("n: vertex count must be non-negative")
        canon = []
        seen = set()
        for idx, pair in enumerate(self.edges):
            u, v = pair
            if u == v:
                raise GraphFormatError(f"edges[{idx}]: self-loop [{u},{v}]")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edges[{idx}]: endpoint out of range [{u},{v}]")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise GraphFormatError(f"edges[{idx}]: duplicate edge [{e[0]},{e[1]}]")
            seen.add(e)
            canon.append(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        weights = tuple(self.weights)
        if len(weights) != self.n:
            raise GraphFormatError(
                f"weights: expected {self.n} entries, got {len(weights)}"
            )
        exact = [isinstance(x, ExactValue) for x in weights]
        if any(exact) and not all(exact):
            raise GraphFormatError("weights: cannot mix exact and float weights")
        if not all(exact):
            for i, x in enumerate(weights):
                xf = float(x)
                if xf != xf or xf in (float("inf"), float("-inf")):
                    raise GraphFormatError(f"weights[{i}]: non-finite weight")
                weights = weights[:i] + (xf,) + weights[i + 1 :]
        object.__setattr__(self, "weights", weights)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, ExactValue) for x in self.weights)

    def degree(self, v: int) -> int:
        return sum(1 for (a, b) in self.edges if a == v or b == v)

    def total_vertex_weight(self) -> Weight:
        if self.is_exact:
            acc = EV_ZERO
            for x in self.weights:
                acc = acc + x
            return acc
        return sum(self.weights)


def all_weights_one(n: int) -> tuple[ExactValue, ...]:
    return (EV_ONE,) * n


def make_graph(
    n: int,
    edges: Iterable[tuple[int, int]],
    weights: Union[Iterable[Weight], None] = None,
    name: Union[str, None] = None,
) -> WeightedGraph:
    ws = tuple(weights) if weights is not None else all_weights_one(n)
    return WeightedGraph(n=n, edges=tuple(edges), weights=ws, name=name)


@lru_cache(maxsize=512)
def adjacency_masks(g: WeightedGraph) -> tuple[int, ...]:
    """Per-vertex neighbor bitmask (vertex i = bit i)."""
    masks = [0] * g.n
    for (u, v) in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return tuple(masks)


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class Configuration:
    """A vertex subset of an n-vertex graph, stored as a bitmask."""

    n: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("configuration bits exceed vertex count")

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int]) -> "Configuration":
        bits = 0
        for v in vertices:
            bits |= 1 << v
        return cls(n, bits)

    @classmethod
    def from_hex(cls, n: int, text: str) -> "Configuration":
        return cls(n, int(text, 16))

    def vertices(self) -> list[int]:
        return [i for i in range(self.n) if (self.bits >> i) & 1]

    def to_hex(self) -> str:
        return format(self.bits, "x")

    def size(self) -> int:
        return self.bits.bit_count()


def _as_bits(g: WeightedGraph, s) -> int:
    bits = s.bits if isinstance(s, Configuration) else s
    if isinstance(s, Configuration) and s.n != g.n:
        raise ValueError(f"configuration indexes {s.n} vertices, graph has {g.n}")
    if bits < 0 or bits >> g.n:
        raise ValueError("configuration bits exceed the graph's vertex count")
    return bits


def is_independent(g: WeightedGraph, s) -> bool:
    """True iff no edge of g has both endpoints selected."""
    bits = _as_bits(g, s)
    for (u, v) in g.edges:
        if (bits >> u) & (bits >> v) & 1:
            return False
    return True


def iter_independent_sets(g: WeightedGraph):
    """Yield every independent set of g as a bitmask, deterministic DFS order."""
    adj = adjacency_masks(g)
    stack = [(0, (1 << g.n) - 1, 0)]
    while stack:
        i, mask, bits = stack.pop()
        while i < g.n and not (mask >> i) & 1:
            i += 1
        if i >= g.n:
            yield bits
            continue
        bit = 1 << i
        stack.append((i + 1, mask & ~bit, bits))
        stack.append((i + 1, mask & ~(adj[i] | bit), bits | bit))


def total_weight(g: WeightedGraph, s) -> Weight:
    """Sum of the weights of the selected vertices (the energy is its negative)."""
    bits = _as_bits(g, s)
    if g.is_exact:
        half = 0
        wbias = 0
        m = bits
        while m:
            lsb = m & -m
            i = lsb.bit_length() - 1
            wt = g.weights[i]
            half += wt.half
            wbias += wt.wbias
            m ^= lsb
        return ExactValue(half, wbias)
    acc = 0.0
    m = bits
    while m:
        lsb = m & -m
        acc += g.weights[lsb.bit_length() - 1]
        m ^= lsb
    return acc


# ---------------------------------------------------------------------------
# Seeded random instances

_M64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return state, z ^ (z >> 31)


class Xoshiro256StarStar:
    """xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.

    Pure 64-bit integer arithmetic, so identical seeds give identical
    streams on every platform.
    """

    def __init__(self, seed: int):
        s = []
        state = seed & _M64
        for _ in range(4):
            state, word = _splitmix64(state)
            s.append(word)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        x = (s1 * 5) & _M64
        x = ((x << 7) | (x >> 57)) & _M64
        result = (x * 9) & _M64
        t = (s1 << 17) & _M64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _M64
        self._s = [s0, s1, s2, s3]
        return result

    def next_double(self) -> float:
        # 53-bit dyadic rational in [0, 1); exact as a float.
        return (self.next_u64() >> 11) * 2.0**-53


def random_gnp(n: int, p, seed: int, name: Union[str, None] = None) -> WeightedGraph:
    """Erdos-Renyi-Gilbert G(n, p) with unit weights.

    Each unordered pair (i, j), scanned in increasing (i, j) order, is kept
    when the next xoshiro256** double is < p. Identical (n, p, seed) give a
    byte-identical graph everywhere.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = Xoshiro256StarStar(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.next_double() < p:
                edges.append((i, j))
    if name is None:
        name = f"gnp-n{n}-seed{seed}"
    return make_graph(n, edges, name=name)


# ---------------------------------------------------------------------------
# JSON serialization


def graph_to_obj(g: WeightedGraph) -> dict:
    if g.is_exact:
        if all(x == EV_ONE for x in g.weights):
            weights = None
        else:
            weights = [{"half": x.half, "w": x.wbias} for x in g.weights]
    else:
        weights = [{"float": x} for x in g.weights]
    return {
        "name": g.name,
        "n": g.n,
        "edges": [[u, v] for (u, v) in g.edges],
        "weights": weights,
    }


def graph_from_obj(obj: dict) -> WeightedGraph:
    if not isinstance(obj, dict):
        raise GraphFormatError("graph: expected a JSON object")
    try:
        n = obj["n"]
        raw_edges = obj["edges"]
    except KeyError as exc:
        raise GraphFormatError(f"graph: missing field {exc.args[0]!r}") from None
    if not isinstance(n, int) or n < 0:
        raise GraphFormatError("n: must be a non-negative integer")
    edges = []
    for idx, pair in enumerate(raw_edges):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise GraphFormatError(f"edges[{idx}]: expected a pair [u,v]")
        u, v = pair
        if not (isinstance(u, int) and isinstance(v, int)):
            raise GraphFormatError(f"edges[{idx}]: endpoints must be integers")
        edges.append((u, v))
    raw_weights = obj.get("weights")
    if raw_weights is None:
        weights = None
    else:
        if len(raw_weights) != n:
            raise GraphFormatError(
                f"weights: expected {n} entries, got {len(raw_weights)}"
            )
        weights = []
        for idx, item in enumerate(raw_weights):
            if not isinstance(item, dict):
                raise GraphFormatError(f"weights[{idx}]: expected an object")
            if "float" in item:
                weights.append(float(item["float"]))
            elif "half" in item and "w" in item:
                weights.append(ExactValue(int(item["half"]), int(item["w"])))
            else:
                raise GraphFormatError(
                    f"weights[{idx}]: expected half/w or float fields"
                )
    return make_graph(n, edges, weights, name=obj.get("name"))


def write_graph(g: WeightedGraph, path, header: Union[dict, None] = None) -> None:
    obj = graph_to_obj(g)
    if header is not None:
        obj["header"] = header
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"graph: invalid JSON ({exc})") from None
    return graph_from_obj(obj)
