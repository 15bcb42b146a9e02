"""Monte Carlo maximum likelihood estimation.

The intractable log-likelihood ratio against a reference point ``theta0`` is
approximated with networks simulated at ``theta0``:

    loglik(theta) - loglik(theta0)
        ~ (theta - theta0) . stats(G_obs)
          - log( mean_i exp((theta - theta0) . stats(G_i)) )

Differentiating gives a score of the form "observed statistics minus an
importance-weighted mean of simulated statistics", optimized here by Fisher
scoring with the weighted statistic covariance as the information estimate.
When the importance weights degenerate (low effective sample size), the step
is truncated and a new simulation round starts at the updated coefficients.

The module also houses an exact-enumeration oracle for tiny graphs: the
normalizer is a sum over all 2^C(n,2) graphs, so likelihood, expectations and
the exact MLE are all computable directly for n <= 6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateSample, NonConvergence, SeparationDiverged
from .graph import NodeAttributes, UndirectedGraph
from .mple import FitResult, mple, normal_ci
from .parallel import parallel_map
from .sampler import SamplerConfig, sample, stream_rng
from .stats import ModelSpec, global_stats

__all__ = [
    "McmleConfig",
    "McmleFit",
    "approx_loglik_ratio",
    "approx_score",
    "importance_weights",
    "effective_sample_size",
    "mcmle_fit",
    "enumerate_stat_matrix",
    "exact_log_normalizer",
    "exact_expectations",
    "exact_mle",
]


@dataclass
class McmleConfig:
    """Sample size, chain schedule and optimizer knobs for one MCMLE fit."""

    sample_size: int = 1000
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    max_outer_rounds: int = 3
    step_tolerance: float = 1e-4
    ess_floor: float = 0.05
    ess_refresh: float = 0.2
    trust_radius: float = 0.5
    max_inner_iter: int = 100
    chains: int = 1
    cores: int = 1
    seed: int | None = None
    theta0: np.ndarray | None = None
    covariance_sample: bool = True

    def __post_init__(self):
        if self.sample_size < 2:
            raise ValueError(f"sample_size must be >= 2, got {self.sample_size}")
        if not 0.0 < self.ess_floor <= 1.0:
            raise ValueError(f"ess_floor must lie in (0, 1], got {self.ess_floor}")
        if self.max_outer_rounds < 1:
            raise ValueError("max_outer_rounds must be >= 1")
        if self.chains < 1:
            raise ValueError("chains must be >= 1")


@dataclass
class McmleFit(FitResult):
    """FitResult plus importance-weight health and the per-round trajectory."""

    ess: float = 0.0
    ess_fraction: float = 0.0
    rounds: int = 0
    trajectory: np.ndarray | None = None  # (rounds + 1, q), first row = theta0
    weight_summary: dict | None = None

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(
            {
                "ess": self.ess,
                "ess_fraction": self.ess_fraction,
                "rounds": self.rounds,
                "trajectory": None if self.trajectory is None else self.trajectory.tolist(),
                "weight_summary": self.weight_summary,
            }
        )
        return d


# -- importance-sampling approximations ---------------------------------------


def approx_loglik_ratio(theta, theta0, sample_stats: np.ndarray, obs_stats) -> float:
    """Simulation-based estimate of loglik(theta) - loglik(theta0).

    ``sample_stats`` must hold statistics of networks drawn at ``theta0``.
    The exponentials are max-shifted inside ``logsumexp``, so large moves do
    not overflow (they just degrade the approximation).
    """
    d = np.asarray(theta, dtype=np.float64) - np.asarray(theta0, dtype=np.float64)
    eta = sample_stats @ d
    return float(d @ np.asarray(obs_stats) - (logsumexp(eta) - math.log(eta.shape[0])))


def importance_weights(theta, theta0, sample_stats: np.ndarray) -> np.ndarray:
    """Normalized weights proportional to exp((theta - theta0) . stats_i)."""
    d = np.asarray(theta, dtype=np.float64) - np.asarray(theta0, dtype=np.float64)
    eta = sample_stats @ d
    eta -= eta.max()
    w = np.exp(eta)
    return w / w.sum()


def effective_sample_size(weights: np.ndarray) -> float:
    w = np.asarray(weights, dtype=np.float64)
    s = w.sum()
    return float(s * s / (w @ w))


def approx_score(theta, theta0, sample_stats: np.ndarray, obs_stats) -> np.ndarray:
    """Gradient of the approximate log-likelihood ratio at ``theta``."""
    w = importance_weights(theta, theta0, sample_stats)
    return np.asarray(obs_stats, dtype=np.float64) - w @ sample_stats


# -- the fit -------------------------------------------------------------------


def _chain_task(args):
    g0, spec, attrs, scfg, key = args
    return sample(g0, spec, attrs, scfg, rng=stream_rng(*key)).stats


def _simulate_stats(g0, spec, attrs, cfg: McmleConfig, key: tuple) -> np.ndarray:
    """Draw cfg.sample_size statistic rows, split over cfg.chains chains.

    The chain count (not the core count) fixes the result, so reruns at any
    parallelism reproduce the same matrix for a given chain count.
    """
    base, extra = divmod(cfg.sample_size, cfg.chains)
    tasks = []
    for c in range(cfg.chains):
        num = base + (1 if c < extra else 0)
        if num == 0:
            continue
        scfg = SamplerConfig(
            burn_in=cfg.sampler.burn_in,
            interval=cfg.sampler.interval,
            num_samples=num,
        )
        tasks.append((g0, spec, attrs, scfg, key + (c,)))
    blocks = parallel_map(_chain_task, tasks, min(cfg.cores, len(tasks)))
    return np.vstack(blocks)


def _optimize_round(obs, S, theta0, cfg: McmleConfig):
    """Fisher scoring against one simulated sample; may end by ESS breach."""
    L = S.shape[0]
    theta = theta0.copy()
    for it in range(1, cfg.max_inner_iter + 1):
        w = importance_weights(theta, theta0, S)
        mu = w @ S
        score = obs - mu
        centered = S - mu
        info = centered.T @ (centered * w[:, None])
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError as e:
            raise DegenerateSample(
                f"singular statistic covariance in the simulated sample: {e}"
            ) from e
        if not np.all(np.isfinite(step)):
            raise DegenerateSample("non-finite Fisher-scoring step")
        if effective_sample_size(w) / L < cfg.ess_floor:
            step = np.clip(step, -cfg.trust_radius, cfg.trust_radius)
            return theta + step, False, True, it
        theta = theta + step
        if float(np.max(np.abs(step))) < cfg.step_tolerance:
            return theta, True, False, it
    return theta, False, False, cfg.max_inner_iter


def mcmle_fit(
    g: UndirectedGraph,
    attrs: NodeAttributes | None,
    spec: ModelSpec,
    cfg: McmleConfig,
) -> McmleFit:
    """Fit by iterated simulation and Fisher scoring; raises on non-convergence.

    ``theta0`` defaults to the MPLE. Within a round the inner optimizer runs
    until its step drops below ``step_tolerance``; a round that ends with an
    effective-sample-size fraction under ``ess_refresh`` (the importance
    approximation is then extrapolating) spends another round simulating at
    the moved coefficients, while an ESS crash under ``ess_floor`` truncates
    the step and forces the refresh. A fit that is still breaching the floor
    (or still inside the inner iteration cap) when rounds run out raises
    ``NonConvergence``; the single-round configuration accepts whatever the
    one approximation stage produced, matching plain one-stage estimation.
    """
    obs = global_stats(g, attrs, spec)
    if cfg.theta0 is not None:
        theta0 = np.asarray(cfg.theta0, dtype=np.float64).copy()
    else:
        theta0 = mple(g, attrs, spec).theta
    seed = cfg.seed if cfg.seed is not None else (cfg.sampler.seed or 0)

    trajectory = [theta0.copy()]
    total_inner = 0
    converged = False
    theta = theta0
    S = None
    for rnd in range(cfg.max_outer_rounds):
        S = _simulate_stats(g, spec.with_theta(theta0), attrs, cfg, (seed, 3, rnd))
        if np.all(S == S[0]):
            raise DegenerateSample(
                "every simulated network produced identical statistics; "
                "the model is likely degenerate at the current coefficients"
            )
        theta, ok, breached, iters = _optimize_round(obs, S, theta0, cfg)
        total_inner += iters
        trajectory.append(theta.copy())
        last = rnd == cfg.max_outer_rounds - 1
        if ok:
            frac = effective_sample_size(importance_weights(theta, theta0, S)) / S.shape[0]
            moved = float(np.max(np.abs(theta - theta0)))
            if last or frac >= cfg.ess_refresh or moved <= cfg.step_tolerance:
                converged = True
                break
        elif last:
            reason = "effective sample size kept collapsing" if breached else (
                "inner optimizer hit its iteration cap"
            )
            raise NonConvergence(
                f"{reason} after {cfg.max_outer_rounds} simulation round(s)"
            )
        theta0 = theta
    if not converged:  # pragma: no cover - loop always breaks or raises
        raise NonConvergence("no stable optimum")

    w = importance_weights(theta, trajectory[-2], S)
    ess = effective_sample_size(w)
    score = obs - w @ S

    if cfg.covariance_sample:
        S2 = _simulate_stats(g, spec.with_theta(theta), attrs, cfg, (seed, 4))
        info = np.atleast_2d(np.cov(S2, rowvar=False))
    else:
        centered = S - w @ S
        info = centered.T @ (centered * w[:, None])
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as e:
        raise DegenerateSample(f"singular statistic covariance at the optimum: {e}") from e

    se = np.sqrt(np.diag(cov))
    return McmleFit(
        estimator="mcmle",
        theta=theta,
        covariance=cov,
        std_errors=se,
        ci=normal_ci(theta, se),
        iterations=total_inner,
        converged=True,
        max_abs_gradient=float(np.max(np.abs(score))),
        term_names=spec.term_names,
        ess=ess,
        ess_fraction=ess / S.shape[0],
        rounds=len(trajectory) - 1,
        trajectory=np.vstack(trajectory),
        weight_summary={
            "max": float(w.max()),
            "min": float(w.min()),
            "ess": ess,
            "ess_fraction": ess / S.shape[0],
        },
    )


# -- exact enumeration oracle (tiny graphs) -------------------------------------

_MAX_ORACLE_NODES = 6


def enumerate_stat_matrix(
    n: int, attrs: NodeAttributes | None, spec: ModelSpec
) -> np.ndarray:
    """Statistics of every graph on n nodes, one row per edge-set bitmask."""
    if n > _MAX_ORACLE_NODES:
        raise ValueError(f"exact enumeration supports n <= {_MAX_ORACLE_NODES}, got {n}")
    pairs = list(combinations(range(n), 2))
    m = len(pairs)
    out = np.empty((1 << m, spec.q))
    for mask in range(1 << m):
        g = UndirectedGraph(n)
        for b, (i, j) in enumerate(pairs):
            if mask >> b & 1:
                g.add_edge(i, j)
        out[mask] = global_stats(g, attrs, spec)
    return out


def exact_log_normalizer(theta, stat_matrix: np.ndarray) -> float:
    """log of the normalizing sum over all enumerated graphs."""
    return float(logsumexp(stat_matrix @ np.asarray(theta, dtype=np.float64)))


def exact_expectations(theta, stat_matrix: np.ndarray) -> np.ndarray:
    """Exact model expectation of every statistic at ``theta``."""
    eta = stat_matrix @ np.asarray(theta, dtype=np.float64)
    eta -= eta.max()
    w = np.exp(eta)
    w /= w.sum()
    return w @ stat_matrix


def exact_mle(
    g: UndirectedGraph,
    attrs: NodeAttributes | None,
    spec: ModelSpec,
    *,
    tol: float = 1e-10,
    max_iter: int = 100,
    theta_bound: float = 1e3,
    stat_matrix: np.ndarray | None = None,
) -> FitResult:
    """Test oracle: maximize the exact likelihood by Newton on exact moments."""
    M = enumerate_stat_matrix(g.n, attrs, spec) if stat_matrix is None else stat_matrix
    obs = global_stats(g, attrs, spec)
    theta = np.zeros(spec.q)

    def loglik(t):
        return float(t @ obs) - exact_log_normalizer(t, M)

    ll = loglik(theta)
    info = None
    for it in range(1, max_iter + 1):
        mu = exact_expectations(theta, M)
        grad = obs - mu
        gmax = float(np.max(np.abs(grad)))
        eta = M @ theta
        eta -= eta.max()
        w = np.exp(eta)
        w /= w.sum()
        centered = M - mu
        info = centered.T @ (centered * w[:, None])
        if gmax <= tol:
            cov = np.linalg.inv(info)
            se = np.sqrt(np.diag(cov))
            return FitResult(
                estimator="exact_mle",
                theta=theta,
                covariance=cov,
                std_errors=se,
                ci=normal_ci(theta, se),
                iterations=it - 1,
                converged=True,
                max_abs_gradient=gmax,
                term_names=spec.term_names,
            )
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError as e:
            raise SeparationDiverged(f"singular information matrix: {e}") from e
        scale = 1.0
        for _ in range(40):
            cand = theta + scale * step
            cll = loglik(cand)
            if cll >= ll - 1e-13 * max(1.0, abs(ll)):
                theta, ll = cand, cll
                break
            scale *= 0.5
        else:
            raise NonConvergence("no ascent direction in exact Newton")
        if float(np.max(np.abs(theta))) > theta_bound:
            raise SeparationDiverged(
                "exact MLE diverged; observed statistics sit on the hull boundary"
            )
    raise NonConvergence(f"exact Newton did not reach tolerance {tol}")
