"""Parametric bootstrap confidence intervals for the pseudolikelihood fit.

Fit the observed network once, simulate ``replicates`` networks from the
fitted model, refit each one, and take percentile bands of the replicate
coefficients. Replicates are exchangeable and embarrassingly parallel: each
one simulates its own chain (full burn-in, started from the observed graph)
on an RNG stream derived from (seed, replicate index), so a replicate can be
reproduced in isolation and results do not depend on the worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BaseFitFailed, EstimationError, TooManyReplicateFailures
from .graph import NodeAttributes, UndirectedGraph
from .mple import FitResult, mple
from .parallel import parallel_map
from .sampler import SamplerConfig, sample, stream_rng
from .stats import ModelSpec

__all__ = ["BootstrapConfig", "BootstrapResult", "percentile_ci", "parametric_bootstrap"]

_REPLICATE_TAG = 2


@dataclass
class BootstrapConfig:
    replicates: int = 500
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    ci_level: float = 0.95
    cores: int = 1
    seed: int = 0
    max_failure_fraction: float = 0.10

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError(f"replicates must be >= 2, got {self.replicates}")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError(f"ci_level must lie in (0, 1), got {self.ci_level}")


@dataclass
class BootstrapResult:
    """Base fit, replicate coefficient matrix and percentile intervals."""

    base_fit: FitResult
    fit: FitResult  # estimator "bootstrap_mple": base point estimate, percentile ci
    replicate_thetas: np.ndarray  # (successes, q)
    replicate_stats: np.ndarray  # (replicates, q) statistics of each simulated network
    ci: np.ndarray  # (q, 2)
    failures: list[tuple[int, str]]
    replicates_requested: int

    @property
    def n_success(self) -> int:
        return self.replicate_thetas.shape[0]


def percentile_ci(samples, level: float) -> np.ndarray:
    """Equal-tail percentile interval with linearly interpolated order statistics."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise ValueError(f"need at least 2 samples for a percentile interval, got {x.size}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    alpha = (1.0 - level) / 2.0
    return np.quantile(x, [alpha, 1.0 - alpha])


def _replicate(args):
    b, g, attrs, fitted_spec, scfg, seed = args
    rng = stream_rng(seed, _REPLICATE_TAG, b)
    one = SamplerConfig(
        burn_in=scfg.burn_in, interval=scfg.interval, num_samples=1, retain_graphs=True
    )
    res = sample(g, fitted_spec, attrs, one, rng=rng)
    sim_stats = res.stats[0]
    try:
        refit = mple(res.graphs[0], attrs, fitted_spec)
    except EstimationError as e:
        return b, None, sim_stats, f"{type(e).__name__}: {e}"
    return b, refit.theta, sim_stats, None


def parametric_bootstrap(
    g: UndirectedGraph,
    attrs: NodeAttributes | None,
    spec: ModelSpec,
    cfg: BootstrapConfig,
) -> BootstrapResult:
    """Percentile bootstrap around the pseudolikelihood fit of ``spec`` on ``g``.

    Replicates whose refit diverges (e.g. a degenerate draw separates a term)
    are dropped with their reason recorded; the run only fails when more than
    ``max_failure_fraction`` of them are lost.
    """
    try:
        base = mple(g, attrs, spec)
    except EstimationError as e:
        raise BaseFitFailed(f"fit on the observed network failed: {e}") from e

    fitted_spec = spec.with_theta(base.theta)
    tasks = [(b, g, attrs, fitted_spec, cfg.sampler, cfg.seed) for b in range(cfg.replicates)]
    results = parallel_map(_replicate, tasks, cfg.cores)
    results.sort(key=lambda r: r[0])

    thetas = []
    failures: list[tuple[int, str]] = []
    rep_stats = np.empty((cfg.replicates, spec.q))
    for b, theta, sim_stats, err in results:
        rep_stats[b] = sim_stats
        if err is None:
            thetas.append(theta)
        else:
            failures.append((b, err))
    if len(failures) > cfg.max_failure_fraction * cfg.replicates:
        raise TooManyReplicateFailures(
            f"{len(failures)} of {cfg.replicates} replicate refits failed "
            f"(tolerated fraction {cfg.max_failure_fraction})"
        )

    T = np.vstack(thetas)
    ci = np.vstack([percentile_ci(T[:, t], cfg.ci_level) for t in range(spec.q)])
    cov = np.atleast_2d(np.cov(T, rowvar=False))
    fit = FitResult(
        estimator="bootstrap_mple",
        theta=base.theta.copy(),
        covariance=cov,
        std_errors=np.sqrt(np.diag(cov)),
        ci=ci,
        iterations=base.iterations,
        converged=base.converged,
        max_abs_gradient=base.max_abs_gradient,
        term_names=spec.term_names,
    )
    return BootstrapResult(
        base_fit=base,
        fit=fit,
        replicate_thetas=T,
        replicate_stats=rep_stats,
        ci=ci,
        failures=failures,
        replicates_requested=cfg.replicates,
    )
