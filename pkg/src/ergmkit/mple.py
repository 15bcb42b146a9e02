"""Maximum pseudolikelihood estimation.

Every dyad contributes one logistic-regression row: response = current edge
state, covariates = the dyad's change statistics. The fit is Newton-Raphson
with step halving; gradient and Hessian are accumulated blockwise so the row
set is never required to fit in memory at once. Standard errors come from the
inverse negative Hessian, which is exactly the usual logistic-regression
covariance (and is known to be optimistic for dependent terms; see the
bootstrap module for calibrated intervals).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np
from scipy.special import comb as _scipy_comb
from scipy.special import expit

from .errors import NonConvergence, SeparationDiverged
from .graph import NodeAttributes, UndirectedGraph
from .stats import ModelSpec, change_from_compiled, compile_terms

__all__ = ["FitResult", "dyad_rows", "fit_logistic", "mple"]

# Above this many matrix cells the shared-partner matrices are not formed and
# the design falls back to per-anchor streaming blocks.
_DENSE_CELLS_MAX = 16_000_000

_Z95 = 1.96


@dataclass
class FitResult:
    """Point estimates plus curvature-based uncertainty for one estimator."""

    estimator: str
    theta: np.ndarray
    covariance: np.ndarray
    std_errors: np.ndarray
    ci: np.ndarray  # (q, 2) lower/upper
    iterations: int
    converged: bool
    max_abs_gradient: float
    term_names: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "terms": list(self.term_names),
            "theta": self.theta.tolist(),
            "std_errors": self.std_errors.tolist(),
            "covariance": self.covariance.tolist(),
            "ci": self.ci.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "max_abs_gradient": self.max_abs_gradient,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        return cls(
            estimator=d["estimator"],
            theta=np.asarray(d["theta"], dtype=np.float64),
            covariance=np.asarray(d["covariance"], dtype=np.float64),
            std_errors=np.asarray(d["std_errors"], dtype=np.float64),
            ci=np.asarray(d["ci"], dtype=np.float64),
            iterations=int(d["iterations"]),
            converged=bool(d["converged"]),
            max_abs_gradient=float(d["max_abs_gradient"]),
            term_names=tuple(d.get("terms", ())),
        )


def normal_ci(theta: np.ndarray, std_errors: np.ndarray, z: float = _Z95) -> np.ndarray:
    return np.column_stack([theta - z * std_errors, theta + z * std_errors])


def dyad_rows(
    g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec
) -> Iterator[tuple[int, list[float]]]:
    """All C(n, 2) logistic rows (edge indicator, change statistics), i < j order."""
    comp = compile_terms(spec, attrs)
    adj = g._adj
    for i in range(g.n - 1):
        adj_i = adj[i]
        for j in range(i + 1, g.n):
            yield (1 if j in adj_i else 0), change_from_compiled(g, comp, i, j)


# -- vectorized design ---------------------------------------------------------


def _vcomb(d: np.ndarray, r: int) -> np.ndarray:
    """Binomial coefficients of integer-valued float arrays, exact for r <= 3."""
    if r == 0:
        return np.ones_like(d)
    if r == 1:
        return np.maximum(d, 0.0)
    if r == 2:
        return np.maximum(d * (d - 1.0), 0.0) / 2.0
    if r == 3:
        return np.maximum(d * (d - 1.0) * (d - 2.0), 0.0) / 6.0
    return _scipy_comb(d, r)


def _dense_design(
    g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Materialize (y, X) for every dyad using dense matrix algebra.

    The edgewise-shared-partner columns use the identity that, for dyad
    (i, j), the retriangulation sum over common neighbors u can be written
    with the shared-partner matrix SP = A @ A as two symmetric matrix
    products, which turns the whole column into a handful of BLAS calls.
    """
    n = g.n
    iu, ju = np.triu_indices(n, k=1)
    A = g.adjacency_matrix()
    cur = A[iu, ju]
    deg = A.sum(axis=1)
    di0 = deg[iu] - cur
    dj0 = deg[ju] - cur

    need_sp = any(t.kind in ("esp", "gwesp") for t in spec.terms)
    SP = A @ A if need_sp else None
    add_mask = cur == 0.0

    cols = []
    for term in spec.terms:
        kind = term.kind
        if kind == "edges":
            cols.append(np.ones(iu.shape[0]))
        elif kind == "node_match":
            vals = attrs[term.attr]
            cols.append((vals[iu] == vals[ju]).astype(np.float64))
        elif kind == "node_cov":
            vals = attrs.numeric(term.attr)
            cols.append(vals[iu] + vals[ju])
        elif kind == "k_star":
            k = term.k
            cols.append(_vcomb(di0, k - 1) + _vcomb(dj0, k - 1))
        elif kind == "gwd":
            base = 1.0 - 1.0 / term.lam
            cols.append(base**di0 + base**dj0)
        elif kind == "alt_k_star":
            lam = term.lam
            base = 1.0 - 1.0 / lam
            cols.append(lam * (2.0 - base**di0 - base**dj0))
        elif kind == "degree_count":
            k = term.k
            cols.append(
                (di0 + 1 == k).astype(np.float64)
                - (di0 == k)
                + (dj0 + 1 == k)
                - (dj0 == k)
            )
        elif kind == "esp":
            k = term.k
            own = (SP[iu, ju] == k).astype(np.float64)
            g0 = (SP == k - 1).astype(np.float64) - (SP == k)
            g1 = (SP == k).astype(np.float64) - (SP == k + 1)
            cols.append(own + _common_neighbor_sides(A, g0, g1, iu, ju, add_mask))
        elif kind == "gwesp":
            lam = term.lam
            base = 1.0 - 1.0 / lam
            own = lam * (1.0 - base ** SP[iu, ju])
            g0 = base**SP
            g1 = base ** (SP - 1.0)
            cols.append(own + _common_neighbor_sides(A, g0, g1, iu, ju, add_mask))
    y = cur
    return y, np.column_stack(cols)


def _common_neighbor_sides(A, g0, g1, iu, ju, add_mask) -> np.ndarray:
    """Sum of per-edge weight steps over common neighbors, for every dyad.

    g0/g1 hold the step for edges evaluated in the toggled-off/on state; the
    dyad's current edge state selects which one applies.
    """
    t0 = (A * g0) @ A
    s0 = (t0 + t0.T)[iu, ju]
    t1 = (A * g1) @ A
    s1 = (t1 + t1.T)[iu, ju]
    return np.where(add_mask, s0, s1)


def _anchor_blocks(
    g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Memory-light fallback: one (y, X) block per anchor node, via the row path."""
    comp = compile_terms(spec, attrs)
    adj = g._adj
    q = spec.q
    for i in range(g.n - 1):
        adj_i = adj[i]
        m = g.n - 1 - i
        y = np.zeros(m)
        X = np.empty((m, q))
        for idx, j in enumerate(range(i + 1, g.n)):
            if j in adj_i:
                y[idx] = 1.0
            X[idx] = change_from_compiled(g, comp, i, j)
        yield y, X


def _design_factory(
    g: UndirectedGraph, attrs: NodeAttributes | None, spec: ModelSpec
) -> Callable[[], Iterable[tuple[np.ndarray, np.ndarray]]]:
    need_sp = any(t.kind in ("esp", "gwesp") for t in spec.terms)
    dense_ok = (not need_sp) or g.n * g.n <= _DENSE_CELLS_MAX
    if dense_ok and g.dyad_count * (spec.q + 1) <= _DENSE_CELLS_MAX:
        y, X = _dense_design(g, attrs, spec)
        return lambda: [(y, X)]
    return lambda: _anchor_blocks(g, attrs, spec)


# -- Newton-Raphson driver ------------------------------------------------------


def _scan(blocks, theta, want_derivs: bool):
    q = theta.shape[0]
    ll = 0.0
    grad = np.zeros(q) if want_derivs else None
    hess = np.zeros((q, q)) if want_derivs else None
    rows = 0
    ones = 0.0
    for y, X in blocks:
        eta = X @ theta
        ll += float(y @ eta - np.logaddexp(0.0, eta).sum())
        rows += y.shape[0]
        ones += float(y.sum())
        if want_derivs:
            p = expit(eta)
            grad += X.T @ (y - p)
            hess -= (X * (p * (1.0 - p))[:, None]).T @ X
    return ll, grad, hess, rows, ones


def _newton_logistic(
    blocks_factory,
    q: int,
    *,
    tol: float = 1e-8,
    max_iter: int = 50,
    theta_bound: float = 1e3,
    max_halvings: int = 20,
):
    """Maximize the logistic log likelihood; returns (theta, covariance, iters, gmax)."""
    theta = np.zeros(q)
    for it in range(1, max_iter + 1):
        ll, grad, hess, rows, ones = _scan(blocks_factory(), theta, True)
        if it == 1:
            if rows == 0:
                raise ValueError("no dyad rows to fit")
            if ones == 0 or ones == rows:
                raise SeparationDiverged(
                    "response has no variation (graph is empty or complete); "
                    "the pseudolikelihood has no maximizer"
                )
        gmax = float(np.max(np.abs(grad)))
        if gmax <= tol:
            try:
                cov = np.linalg.inv(-hess)
            except np.linalg.LinAlgError as e:
                raise SeparationDiverged(f"singular Hessian at the optimum: {e}") from e
            return theta, cov, it - 1, gmax
        try:
            step = np.linalg.solve(-hess, grad)
        except np.linalg.LinAlgError as e:
            raise SeparationDiverged(
                f"singular Hessian; a term likely predicts ties perfectly: {e}"
            ) from e
        if not np.all(np.isfinite(step)):
            raise SeparationDiverged("non-finite Newton step")
        scale = 1.0
        for _ in range(max_halvings + 1):
            cand = theta + scale * step
            cll, _, _, _, _ = _scan(blocks_factory(), cand, False)
            if cll >= ll - 1e-12 * max(1.0, abs(ll)):
                theta = cand
                break
            scale *= 0.5
        else:
            raise NonConvergence("step halving found no ascent direction")
        if float(np.max(np.abs(theta))) > theta_bound:
            raise SeparationDiverged(
                f"coefficient magnitude exceeded {theta_bound}; "
                "a term likely predicts ties perfectly"
            )
    raise NonConvergence(f"gradient above {tol} after {max_iter} iterations")


def fit_logistic(
    rows: Iterable[tuple[float, Iterable[float]]],
    *,
    tol: float = 1e-8,
    max_iter: int = 50,
    theta_bound: float = 1e3,
    term_names: tuple[str, ...] = (),
) -> FitResult:
    """Newton-Raphson logistic fit on (response, covariates) rows."""
    ys = []
    xs = []
    for y, x in rows:
        ys.append(float(y))
        xs.append(x)
    if not ys:
        raise ValueError("no rows given")
    y = np.asarray(ys)
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("covariate rows must share one length")
    if not X.any():
        raise ValueError("design matrix is all zeros")
    theta, cov, iters, gmax = _newton_logistic(
        lambda: [(y, X)], X.shape[1], tol=tol, max_iter=max_iter, theta_bound=theta_bound
    )
    se = np.sqrt(np.diag(cov))
    return FitResult(
        estimator="mple",
        theta=theta,
        covariance=cov,
        std_errors=se,
        ci=normal_ci(theta, se),
        iterations=iters,
        converged=True,
        max_abs_gradient=gmax,
        term_names=term_names,
    )


def mple(
    g: UndirectedGraph,
    attrs: NodeAttributes | None,
    spec: ModelSpec,
    *,
    tol: float = 1e-8,
    max_iter: int = 50,
    theta_bound: float = 1e3,
) -> FitResult:
    """Maximum pseudolikelihood fit of ``spec`` on the observed graph."""
    factory = _design_factory(g, attrs, spec)
    theta, cov, iters, gmax = _newton_logistic(
        factory, spec.q, tol=tol, max_iter=max_iter, theta_bound=theta_bound
    )
    se = np.sqrt(np.diag(cov))
    return FitResult(
        estimator="mple",
        theta=theta,
        covariance=cov,
        std_errors=se,
        ci=normal_ci(theta, se),
        iterations=iters,
        converged=True,
        max_abs_gradient=gmax,
        term_names=spec.term_names,
    )
