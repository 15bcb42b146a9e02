"""Network sufficient statistics and their single-dyad change statistics.

Supported terms: edge count, categorical homophily, numeric covariate sums,
edgewise shared partners (exact-k and geometrically weighted), k-stars,
alternating k-stars, geometrically weighted degrees and degree counts.

Geometric terms take a public decay ``tau > 0`` and use ``lam = exp(tau)``
internally; the internal weight can also be passed directly via ``weight``
(must exceed 1, otherwise the geometric series misbehaves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import NodeAttributes, UndirectedGraph

__all__ = [
    "Term",
    "ModelSpec",
    "global_stats",
    "change_stats",
    "brute_force_change",
    "altkstar_degree_form",
    "altkstar_alternating_sum",
    "esp_histogram",
    "degree_histogram",
    "compile_terms",
    "change_from_compiled",
]

TERM_KINDS = (
    "edges",
    "node_match",
    "node_cov",
    "esp",
    "k_star",
    "gwesp",
    "alt_k_star",
    "gwd",
    "degree_count",
)
_GEOMETRIC = frozenset({"gwesp", "alt_k_star", "gwd"})
_NEEDS_ATTR = frozenset({"node_match", "node_cov"})
_NEEDS_K = frozenset({"esp", "k_star", "degree_count"})


@dataclass(frozen=True)
class Term:
    """One model term: a statistic kind plus its parameters."""

    kind: str
    attr: str | None = None
    k: int | None = None
    decay: float | None = None
    weight: float | None = None

    def __post_init__(self):
        if self.kind not in TERM_KINDS:
            raise InputError(f"unknown term kind {self.kind!r}; expected one of {TERM_KINDS}")
        if self.kind in _NEEDS_ATTR:
            if not self.attr:
                raise InputError(f"term {self.kind!r} requires an attribute name")
        elif self.attr is not None:
            raise InputError(f"term {self.kind!r} takes no attribute")
        if self.kind in _NEEDS_K:
            k_min = 2 if self.kind == "k_star" else 1
            if self.k is None or self.k < k_min:
                raise InputError(f"term {self.kind!r} requires integer k >= {k_min}")
        elif self.k is not None:
            raise InputError(f"term {self.kind!r} takes no k")
        if self.kind in _GEOMETRIC:
            if (self.decay is None) == (self.weight is None):
                raise InputError(
                    f"term {self.kind!r} requires exactly one of decay (tau > 0) or weight (> 1)"
                )
            if self.decay is not None and self.decay <= 0:
                raise InputError(f"term {self.kind!r} needs decay > 0, got {self.decay}")
            if self.weight is not None and self.weight <= 1:
                raise InputError(f"term {self.kind!r} needs weight > 1, got {self.weight}")
        elif self.decay is not None or self.weight is not None:
            raise InputError(f"term {self.kind!r} takes no decay/weight")

    @property
    def lam(self) -> float:
        """Internal geometric weight (> 1)."""
        if self.weight is not None:
            return float(self.weight)
        return math.exp(float(self.decay))

    @property
    def name(self) -> str:
        if self.kind in _NEEDS_ATTR:
            return f"{self.kind}({self.attr})"
        if self.kind in _NEEDS_K:
            return f"{self.kind}({self.k})"
        if self.kind in _GEOMETRIC:
            if self.decay is not None:
                return f"{self.kind}({self.decay:g})"
            return f"{self.kind}(w={self.weight:g})"
        return self.kind

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        for key in ("attr", "k", "decay", "weight"):
            v = getattr(self, key)
            if v is not None:
                d[key] = v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Term":
        extra = set(d) - {"kind", "attr", "k", "decay", "weight"}
        if extra:
            raise InputError(f"unknown term keys {sorted(extra)} in {d}")
        if "kind" not in d:
            raise InputError(f"term entry missing 'kind': {d}")
        return cls(**d)


@dataclass
class ModelSpec:
    """Ordered list of terms plus a coefficient vector of matching length.

    The term order fixes the coefficient order in every fit, sample matrix
    and report produced from this spec.
    """

    terms: tuple[Term, ...]
    theta: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.terms = tuple(self.terms)
        if not self.terms:
            raise InputError("a model needs at least one term")
        if self.theta is None:
            self.theta = np.zeros(len(self.terms))
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.shape != (len(self.terms),):
            raise InputError(
                f"theta has shape {self.theta.shape}, expected ({len(self.terms)},)"
            )

    @property
    def q(self) -> int:
        return len(self.terms)

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.terms)

    def with_theta(self, theta) -> "ModelSpec":
        return ModelSpec(self.terms, np.asarray(theta, dtype=np.float64).copy())

    def to_dict(self) -> dict:
        return {"terms": [t.to_dict() for t in self.terms], "theta": self.theta.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        extra = set(d) - {"terms", "theta"}
        if extra:
            raise InputError(f"unknown model keys {sorted(extra)}")
        if "terms" not in d or not d["terms"]:
            raise InputError("model config needs a non-empty 'terms' list")
        terms = tuple(Term.from_dict(t) for t in d["terms"])
        theta = d.get("theta")
        return cls(terms, None if theta is None else np.asarray(theta, dtype=np.float64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return self.terms == other.terms and np.array_equal(self.theta, other.theta)


# -- histograms shared by several statistics --------------------------------


def esp_histogram(g: UndirectedGraph) -> np.ndarray:
    """hist[s] = number of edges whose endpoints share exactly s partners (s = 0..n-2)."""
    hist = np.zeros(max(g.n - 1, 1), dtype=np.int64)
    adj = g._adj
    for i, j in g.edges():
        hist[len(adj[i] & adj[j])] += 1
    return hist


def degree_histogram(g: UndirectedGraph) -> np.ndarray:
    """hist[d] = number of nodes with degree d (d = 0..n-1)."""
    hist = np.zeros(g.n, dtype=np.int64)
    for s in g._adj:
        hist[len(s)] += 1
    return hist


def _geometric_weights(lam: float, jmax: int) -> np.ndarray:
    """w[j] = lam * (1 - (1 - 1/lam)^j) for j = 0..jmax; w[0] = 0."""
    j = np.arange(jmax + 1)
    return lam * (1.0 - (1.0 - 1.0 / lam) ** j)


def _gwd_value(g: UndirectedGraph, lam: float) -> float:
    dh = degree_histogram(g)
    w = _geometric_weights(lam, g.n - 1)
    return float(w[: dh.shape[0]] @ dh)


def altkstar_degree_form(g: UndirectedGraph, lam: float) -> float:
    """Alternating k-star value computed from the degree distribution.

    Equals ``lam * (2 * edges - gwd(lam))``, which matches the alternating-sum
    definition exactly for every graph.
    """
    if lam <= 1:
        raise InputError(f"geometric weight must exceed 1, got {lam}")
    return lam * (2.0 * g.edge_count - _gwd_value(g, lam))


def altkstar_alternating_sum(g: UndirectedGraph, lam: float) -> float:
    """Direct alternating sum over k-star counts: sum_{k>=2} (-1/lam)^(k-2) * S_k."""
    if lam <= 1:
        raise InputError(f"geometric weight must exceed 1, got {lam}")
    total = 0.0
    sign_base = -1.0 / lam
    for d in g.degrees():
        for k in range(2, d + 1):
            total += sign_base ** (k - 2) * math.comb(d, k)
    return total


# -- global statistics -------------------------------------------------------


def global_stats(g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec) -> np.ndarray:
    """Evaluate every term's statistic on the full graph, in term order."""
    out = np.empty(spec.q)
    esp_hist = None
    deg_hist = None
    for t, term in enumerate(spec.terms):
        kind = term.kind
        if kind == "edges":
            out[t] = g.edge_count
        elif kind == "node_match":
            vals = _require_attrs(attrs, term).values_list(term.attr)
            out[t] = sum(1 for i, j in g.edges() if vals[i] == vals[j])
        elif kind == "node_cov":
            col = _require_attrs(attrs, term).numeric(term.attr)
            out[t] = sum(col[i] + col[j] for i, j in g.edges())
        elif kind == "esp":
            if esp_hist is None:
                esp_hist = esp_histogram(g)
            out[t] = esp_hist[term.k] if term.k < esp_hist.shape[0] else 0.0
        elif kind == "gwesp":
            if esp_hist is None:
                esp_hist = esp_histogram(g)
            w = _geometric_weights(term.lam, esp_hist.shape[0] - 1)
            out[t] = float(w @ esp_hist)
        elif kind == "k_star":
            if deg_hist is None:
                deg_hist = degree_histogram(g)
            out[t] = sum(math.comb(d, term.k) * c for d, c in enumerate(deg_hist.tolist()))
        elif kind == "gwd":
            out[t] = _gwd_value(g, term.lam)
        elif kind == "alt_k_star":
            out[t] = altkstar_degree_form(g, term.lam)
        elif kind == "degree_count":
            if deg_hist is None:
                deg_hist = degree_histogram(g)
            out[t] = deg_hist[term.k] if term.k < deg_hist.shape[0] else 0.0
        else:  # pragma: no cover - Term validation forbids this
            raise InputError(f"unknown term kind {kind!r}")
    return out


def _require_attrs(attrs: NodeAttributes | None, term: Term) -> NodeAttributes:
    from .errors import MissingAttribute

    if attrs is None:
        raise MissingAttribute(f"term {term.name!r} needs node attributes, none given")
    return attrs


# -- change statistics --------------------------------------------------------
#
# change_stats returns the 0 -> 1 toggle difference for dyad (i, j), i.e.
# stats(graph with the edge) - stats(graph without it), regardless of the
# dyad's current state. The hot path works on a "compiled" term list so the
# sampler does not re-resolve attribute columns and weights every step.

_OP_EDGES = 0
_OP_MATCH = 1
_OP_COV = 2
_OP_ESP = 3
_OP_GWESP = 4
_OP_KSTAR = 5
_OP_GWD = 6
_OP_AKS = 7
_OP_DEGCOUNT = 8


def compile_terms(spec: ModelSpec, attrs: NodeAttributes | None) -> list[tuple]:
    """Resolve terms into (opcode, params...) tuples for the fast change path."""
    comp: list[tuple] = []
    for term in spec.terms:
        kind = term.kind
        if kind == "edges":
            comp.append((_OP_EDGES,))
        elif kind == "node_match":
            comp.append((_OP_MATCH, _require_attrs(attrs, term).values_list(term.attr)))
        elif kind == "node_cov":
            comp.append((_OP_COV, _require_attrs(attrs, term).numeric(term.attr).tolist()))
        elif kind == "esp":
            comp.append((_OP_ESP, term.k))
        elif kind == "gwesp":
            lam = term.lam
            comp.append((_OP_GWESP, lam, 1.0 - 1.0 / lam))
        elif kind == "k_star":
            comp.append((_OP_KSTAR, term.k))
        elif kind == "gwd":
            comp.append((_OP_GWD, 1.0 - 1.0 / term.lam))
        elif kind == "alt_k_star":
            lam = term.lam
            comp.append((_OP_AKS, lam, 1.0 - 1.0 / lam))
        elif kind == "degree_count":
            comp.append((_OP_DEGCOUNT, term.k))
    return comp


def change_from_compiled(g: UndirectedGraph, comp: list[tuple], i: int, j: int) -> list[float]:
    """Per-term 0 -> 1 toggle differences for dyad (i, j) as a plain list."""
    adj = g._adj
    adj_i = adj[i]
    adj_j = adj[j]
    cur = 1 if j in adj_i else 0
    di0 = len(adj_i) - cur
    dj0 = len(adj_j) - cur
    common = None
    out = []
    for op in comp:
        code = op[0]
        if code == _OP_EDGES:
            out.append(1.0)
        elif code == _OP_MATCH:
            vals = op[1]
            out.append(1.0 if vals[i] == vals[j] else 0.0)
        elif code == _OP_COV:
            vals = op[1]
            out.append(vals[i] + vals[j])
        elif code == _OP_ESP or code == _OP_GWESP:
            if common is None:
                common = adj_i & adj_j
            if code == _OP_ESP:
                k = op[1]
                d = 1.0 if len(common) == k else 0.0
                for u in common:
                    adj_u = adj[u]
                    s_iu = len(adj_i & adj_u) - cur
                    s_ju = len(adj_j & adj_u) - cur
                    if s_iu + 1 == k:
                        d += 1.0
                    elif s_iu == k:
                        d -= 1.0
                    if s_ju + 1 == k:
                        d += 1.0
                    elif s_ju == k:
                        d -= 1.0
            else:
                lam, base = op[1], op[2]
                d = lam * (1.0 - base ** len(common))
                for u in common:
                    adj_u = adj[u]
                    # per-edge weight step h(s+1) - h(s) reduces to base^s
                    d += base ** (len(adj_i & adj_u) - cur)
                    d += base ** (len(adj_j & adj_u) - cur)
            out.append(d)
        elif code == _OP_KSTAR:
            k = op[1]
            out.append(float(math.comb(di0, k - 1) + math.comb(dj0, k - 1)))
        elif code == _OP_GWD:
            base = op[1]
            out.append(base**di0 + base**dj0)
        elif code == _OP_AKS:
            lam, base = op[1], op[2]
            out.append(lam * (2.0 - base**di0 - base**dj0))
        else:  # _OP_DEGCOUNT
            k = op[1]
            d = 0.0
            if di0 + 1 == k:
                d += 1.0
            elif di0 == k:
                d -= 1.0
            if dj0 + 1 == k:
                d += 1.0
            elif dj0 == k:
                d -= 1.0
            out.append(d)
    return out


def change_stats(
    g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec, i: int, j: int
) -> np.ndarray:
    """0 -> 1 toggle difference of every statistic for dyad (i, j)."""
    if i == j:
        raise ValueError(f"change statistics need a dyad, got node {i} twice")
    g._check_pair(i, j)
    return np.array(change_from_compiled(g, compile_terms(spec, attrs), i, j))


def brute_force_change(
    g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec, i: int, j: int
) -> np.ndarray:
    """Test oracle: difference of global statistics across the two toggle states."""
    if i == j:
        raise ValueError(f"change statistics need a dyad, got node {i} twice")
    g._check_pair(i, j)
    work = g.copy()
    if work.has_edge(i, j):
        work.toggle(i, j)
    absent = global_stats(work, attrs, spec)
    work.toggle(i, j)
    present = global_stats(work, attrs, spec)
    return present - absent
