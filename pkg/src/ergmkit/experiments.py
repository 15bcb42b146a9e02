"""Simulation studies: estimator accuracy, interval coverage, and timing.

Three harnesses, each emitting a tidy row set plus a summary:

* ``rmse_study``   -- accuracy of the simulation-based estimator versus the
  pseudolikelihood as the Monte Carlo sample size grows (log relative RMSE).
* ``coverage_study`` -- how often normal-approximation, naive logistic and
  bootstrap-percentile intervals cover the generating coefficients, plus the
  pseudolikelihood bias sample.
* ``timing_study`` -- measured wall-clock inputs fed through the closed-form
  parallel timing model (simulation prefix plus refits divided by cores).

Replicates derive their RNG streams from (seed, tag, index), so reports are
reproducible at a fixed seed regardless of worker scheduling.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from .bootstrap import BootstrapConfig, parametric_bootstrap
from .errors import EstimationError
from .graph import NodeAttributes, UndirectedGraph
from .mcmle import McmleConfig, mcmle_fit
from .mple import mple
from .parallel import parallel_map
from .sampler import SamplerConfig, derive_seed, sample, stream_rng
from .stats import ModelSpec, Term

__all__ = [
    "TimingInputs",
    "timing_model",
    "rmse",
    "log_relative_rmse",
    "StudyConfig",
    "TimingStudyConfig",
    "ExperimentReport",
    "rmse_study",
    "coverage_study",
    "timing_study",
    "timing_curve_report",
    "default_coverage_config",
    "default_rmse_config",
    "default_timing_config",
]

_TAG_DATA_RMSE = 11
_TAG_MCMLE_RMSE = 12
_TAG_DATA_COV = 21
_TAG_BOOT_COV = 22
_TAG_MCMLE_COV = 23
_TAG_TIMING_OBS = 31
_TAG_TIMING_SIM = 32
_TAG_TIMING_MCMLE = 33

# Reference plateau values quoted for 500-core runs on the original hardware;
# rendered as reference lines only, never asserted.
REFERENCE_PLATEAUS = {"small": 0.20, "medium": 0.17, "large": 0.20}


# -- pure arithmetic ------------------------------------------------------------


@dataclass
class TimingInputs:
    """Measured wall-clock inputs of the parallel timing model."""

    network_sim_time: float
    mple_fit_time: float
    mcmle_time: float
    replicates: int = 500
    cores: int = 1

    def __post_init__(self):
        for name in ("network_sim_time", "mple_fit_time", "mcmle_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.replicates < 1 or self.cores < 1:
            raise ValueError("replicates and cores must be >= 1")


def timing_model(t: TimingInputs) -> tuple[float, float]:
    """(bootstrap time, bootstrap time / mcmle time) at ``t.cores`` cores.

    The simulation of the replicate networks is treated as a serial prefix;
    only the refits divide by the core count.
    """
    boot = t.network_sim_time + t.replicates * t.mple_fit_time / t.cores
    return boot, boot / t.mcmle_time


def rmse(theta_true, estimates) -> np.ndarray:
    """Per-coordinate root mean square error of an estimate matrix (m, q)."""
    t = np.asarray(theta_true, dtype=np.float64)
    e = np.atleast_2d(np.asarray(estimates, dtype=np.float64))
    return np.sqrt(np.mean((e - t) ** 2, axis=0))


def log_relative_rmse(rmse_mcmle, rmse_mple) -> np.ndarray:
    """log(RMSE_mcmle / RMSE_mple); negative favors the simulation estimator."""
    a = np.asarray(rmse_mcmle, dtype=np.float64)
    b = np.asarray(rmse_mple, dtype=np.float64)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("RMSE values must be positive to take a log ratio")
    return np.log(a / b)


# -- study configuration ---------------------------------------------------------


@dataclass
class StudyConfig:
    """Generator model, replicate count and per-estimator settings for a study."""

    spec: ModelSpec  # theta holds the generating coefficients in "given" mode
    n: int
    attrs: NodeAttributes | None
    replicates: int
    seed: int
    data_sampler: SamplerConfig
    mcmle: McmleConfig | None = None
    bootstrap: BootstrapConfig | None = None
    mcmle_sample_grid: tuple[int, ...] = ()
    cores: int = 1
    ci_level: float = 0.95
    truth_mode: str = "given"  # or "mple" / "mcmle" fitted on seed_graph
    seed_graph: UndirectedGraph | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.mcmle_sample_grid:
            grid = tuple(self.mcmle_sample_grid)
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"sample grid must be strictly increasing, got {grid}")
            self.mcmle_sample_grid = grid
        if self.truth_mode not in ("given", "mple", "mcmle"):
            raise ValueError(f"unknown truth_mode {self.truth_mode!r}")
        if self.truth_mode != "given" and self.seed_graph is None:
            raise ValueError(f"truth_mode {self.truth_mode!r} needs a seed_graph")


@dataclass
class ExperimentReport:
    """Tidy per-replicate rows plus aggregate summary, both serializable."""

    kind: str
    rows: list[dict]
    summary: dict
    config: dict

    def to_csv(self, path) -> Path:
        path = Path(path)
        keys: list[str] = []
        for row in self.rows:
            for k in row:
                if k not in keys:
                    keys.append(k)
        with open(path, "w") as fh:
            fh.write(",".join(keys) + "\n")
            for row in self.rows:
                fh.write(",".join(_cell(row.get(k)) for k in keys) + "\n")
        return path

    def to_json(self, path) -> Path:
        path = Path(path)
        doc = {"kind": self.kind, "config": self.config, "summary": self.summary}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _resolve_truth(cfg: StudyConfig) -> tuple[np.ndarray, str]:
    if cfg.truth_mode == "given":
        return cfg.spec.theta.copy(), "given"
    if cfg.truth_mode == "mple":
        fit = mple(cfg.seed_graph, cfg.attrs, cfg.spec)
        return fit.theta, "mple(seed_graph)"
    mcfg = cfg.mcmle if cfg.mcmle is not None else McmleConfig(
        sampler=SamplerConfig(burn_in=10 * cfg.seed_graph.dyad_count, interval=1000)
    )
    fit = mcmle_fit(cfg.seed_graph, cfg.attrs, cfg.spec, mcfg)
    return fit.theta, "mcmle(seed_graph)"


def _one_sample_cfg(scfg: SamplerConfig) -> SamplerConfig:
    return SamplerConfig(
        burn_in=scfg.burn_in, interval=scfg.interval, num_samples=1, retain_graphs=True
    )


def _term_rows(base: dict, names, theta_true, estimate, lower=None, upper=None) -> list[dict]:
    rows = []
    for t, name in enumerate(names):
        row = dict(base)
        row["term"] = name
        row["estimate"] = float(estimate[t])
        row["bias"] = float(estimate[t] - theta_true[t])
        if lower is not None:
            row["lower"] = float(lower[t])
            row["upper"] = float(upper[t])
            row["covered"] = int(lower[t] <= theta_true[t] <= upper[t])
        rows.append(row)
    return rows


def _error_rows(base: dict, names, err: BaseException) -> list[dict]:
    rows = []
    for name in names:
        row = dict(base)
        row["term"] = name
        row["error"] = f"{type(err).__name__}: {err}"
        rows.append(row)
    return rows


# -- RMSE study -------------------------------------------------------------------


def _rmse_replicate(args):
    r, cfg, theta_true = args
    spec_true = cfg.spec.with_theta(theta_true)
    names = cfg.spec.term_names
    g = sample(
        UndirectedGraph(cfg.n),
        spec_true,
        cfg.attrs,
        _one_sample_cfg(cfg.data_sampler),
        rng=stream_rng(cfg.seed, _TAG_DATA_RMSE, r),
    ).graphs[0]
    rows: list[dict] = []
    theta0 = None
    base = {"replicate": r, "method": "mple", "sample_size": None}
    try:
        f = mple(g, cfg.attrs, spec_true)
        theta0 = f.theta
        rows += _term_rows(base, names, theta_true, f.theta)
    except EstimationError as e:
        rows += _error_rows(base, names, e)
    for L in cfg.mcmle_sample_grid:
        base_l = {"replicate": r, "method": "mcmle", "sample_size": L}
        if theta0 is None:
            rows += _error_rows(base_l, names, EstimationError("no initial fit"))
            continue
        mcfg = replace(
            cfg.mcmle,
            sample_size=L,
            theta0=theta0,
            seed=derive_seed(cfg.seed, _TAG_MCMLE_RMSE, r, L),
            cores=1,
        )
        try:
            mf = mcmle_fit(g, cfg.attrs, spec_true, mcfg)
            rows += _term_rows(base_l, names, theta_true, mf.theta)
        except EstimationError as e:
            rows += _error_rows(base_l, names, e)
    return r, rows


def rmse_study(cfg: StudyConfig) -> ExperimentReport:
    """Accuracy comparison across the Monte Carlo sample-size grid.

    Simulates ``replicates`` networks at the generating coefficients, fits
    the pseudolikelihood once per network and the simulation estimator once
    per grid size, then summarizes per-coordinate log relative RMSE.
    """
    if not cfg.mcmle_sample_grid:
        raise ValueError("rmse_study needs a non-empty mcmle_sample_grid")
    if cfg.mcmle is None:
        raise ValueError("rmse_study needs an mcmle configuration")
    theta_true, truth_label = _resolve_truth(cfg)
    results = parallel_map(
        _rmse_replicate,
        [(r, cfg, theta_true) for r in range(cfg.replicates)],
        cfg.cores,
    )
    results.sort(key=lambda x: x[0])
    rows = [row for _, rep_rows in results for row in rep_rows]

    names = cfg.spec.term_names
    est = {("mple", None): []}
    for L in cfg.mcmle_sample_grid:
        est[("mcmle", L)] = []
    by_rep: dict = {}
    for row in rows:
        if row.get("error"):
            continue
        key = (row["replicate"], row["method"], row["sample_size"])
        by_rep.setdefault(key, {})[row["term"]] = row["estimate"]
    for (r, method, L), vals in sorted(by_rep.items(), key=lambda kv: (kv[0][0], str(kv[0]))):
        if len(vals) == len(names):
            est[(method, L)].append([vals[t] for t in names])

    summary: dict = {
        "theta_true": theta_true.tolist(),
        "truth_mode": truth_label,
        "terms": list(names),
        "sample_grid": list(cfg.mcmle_sample_grid),
        "replicates": cfg.replicates,
        "successes": {
            "mple": len(est[("mple", None)]),
            "mcmle": {str(L): len(est[("mcmle", L)]) for L in cfg.mcmle_sample_grid},
        },
    }
    if est[("mple", None)]:
        r_mple = rmse(theta_true, np.array(est[("mple", None)]))
        summary["rmse"] = {"mple": r_mple.tolist(), "mcmle": {}}
        summary["log_relative_rmse"] = {}
        ratios_by_term: dict[str, list[float]] = {t: [] for t in names}
        grid_used: list[int] = []
        for L in cfg.mcmle_sample_grid:
            block = est[("mcmle", L)]
            if not block:
                continue
            r_mc = rmse(theta_true, np.array(block))
            summary["rmse"]["mcmle"][str(L)] = r_mc.tolist()
            ratio = log_relative_rmse(r_mc, r_mple)
            summary["log_relative_rmse"][str(L)] = ratio.tolist()
            grid_used.append(L)
            for t, name in enumerate(names):
                ratios_by_term[name].append(float(ratio[t]))
        trend = {}
        for name in names:
            vals = ratios_by_term[name]
            entry: dict = {"values": vals}
            if len(vals) >= 2:
                rho = spearmanr(grid_used, vals).statistic
                entry["spearman_vs_sample_size"] = None if np.isnan(rho) else float(rho)
                entry["sign_change_pos_to_neg"] = bool(vals[0] > 0 and vals[-1] < 0)
            trend[name] = entry
        summary["trend"] = trend
    if cfg.replicates >= 2 and est[("mple", None)]:
        summary["mple_estimate_sd"] = np.array(est[("mple", None)]).std(axis=0, ddof=1).tolist()
    return ExperimentReport(
        kind="rmse",
        rows=rows,
        summary=summary,
        config=_config_echo(cfg),
    )


# -- coverage study ------------------------------------------------------------------


def _coverage_replicate(args):
    r, cfg, theta_true = args
    spec_true = cfg.spec.with_theta(theta_true)
    names = cfg.spec.term_names
    g = sample(
        UndirectedGraph(cfg.n),
        spec_true,
        cfg.attrs,
        _one_sample_cfg(cfg.data_sampler),
        rng=stream_rng(cfg.seed, _TAG_DATA_COV, r),
    ).graphs[0]
    rows: list[dict] = []
    theta0 = None
    base = {"replicate": r, "method": "mple"}
    try:
        f = mple(g, cfg.attrs, spec_true)
        theta0 = f.theta
        rows += _term_rows(base, names, theta_true, f.theta, f.ci[:, 0], f.ci[:, 1])
    except EstimationError as e:
        rows += _error_rows(base, names, e)

    if cfg.bootstrap is not None:
        base_b = {"replicate": r, "method": "bootstrap_mple"}
        bcfg = replace(
            cfg.bootstrap,
            ci_level=cfg.ci_level,
            cores=1,
            seed=derive_seed(cfg.seed, _TAG_BOOT_COV, r),
        )
        try:
            bres = parametric_bootstrap(g, cfg.attrs, spec_true, bcfg)
            rows += _term_rows(
                base_b, names, theta_true, bres.fit.theta, bres.ci[:, 0], bres.ci[:, 1]
            )
        except EstimationError as e:
            rows += _error_rows(base_b, names, e)

    if cfg.mcmle is not None:
        base_m = {"replicate": r, "method": "mcmle"}
        if theta0 is None:
            rows += _error_rows(base_m, names, EstimationError("no initial fit"))
        else:
            mcfg = replace(
                cfg.mcmle,
                theta0=theta0,
                seed=derive_seed(cfg.seed, _TAG_MCMLE_COV, r),
                cores=1,
            )
            try:
                mf = mcmle_fit(g, cfg.attrs, spec_true, mcfg)
                rows += _term_rows(base_m, names, theta_true, mf.theta, mf.ci[:, 0], mf.ci[:, 1])
            except EstimationError as e:
                rows += _error_rows(base_m, names, e)
    return r, rows


def coverage_study(cfg: StudyConfig) -> ExperimentReport:
    """Interval coverage of the generating coefficients, by method and term.

    Per replicate: simulate a network at the truth, then record whether each
    method's interval covers each true coordinate. The summary also carries
    the pseudolikelihood bias sample (median/IQR per term) and the nominal
    level for plotting.
    """
    theta_true, truth_label = _resolve_truth(cfg)
    results = parallel_map(
        _coverage_replicate,
        [(r, cfg, theta_true) for r in range(cfg.replicates)],
        cfg.cores,
    )
    results.sort(key=lambda x: x[0])
    rows = [row for _, rep_rows in results for row in rep_rows]

    names = cfg.spec.term_names
    methods = ["mple"]
    if cfg.bootstrap is not None:
        methods.append("bootstrap_mple")
    if cfg.mcmle is not None:
        methods.append("mcmle")
    coverage: dict = {}
    successes: dict = {}
    for method in methods:
        per_term = {}
        count = None
        for name in names:
            hits = [
                row["covered"]
                for row in rows
                if row["method"] == method and row["term"] == name and not row.get("error")
            ]
            per_term[name] = float(np.mean(hits)) if hits else None
            count = len(hits)
        coverage[method] = per_term
        successes[method] = count
    bias_summary = {}
    for name in names:
        sample_bias = np.array(
            [
                row["bias"]
                for row in rows
                if row["method"] == "mple" and row["term"] == name and not row.get("error")
            ]
        )
        if sample_bias.size:
            q1, med, q3 = np.percentile(sample_bias, [25, 50, 75])
            bias_summary[name] = {
                "median": float(med),
                "iqr": float(q3 - q1),
                "n": int(sample_bias.size),
            }
    summary = {
        "nominal_level": cfg.ci_level,
        "theta_true": theta_true.tolist(),
        "truth_mode": truth_label,
        "terms": list(names),
        "replicates": cfg.replicates,
        "coverage": coverage,
        "successes": successes,
        "mple_bias": bias_summary,
    }
    return ExperimentReport(
        kind="coverage", rows=rows, summary=summary, config=_config_echo(cfg)
    )


# -- timing study ------------------------------------------------------------------


@dataclass
class TimingStudyConfig:
    spec: ModelSpec
    n: int
    attrs: NodeAttributes | None
    seed: int
    observed_sampler: SamplerConfig
    replicate_sampler: SamplerConfig
    replicates: int
    mcmle: McmleConfig
    cores_grid: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128, 500)


def timing_curve_report(inputs: TimingInputs, cores_grid, config: dict | None = None) -> ExperimentReport:
    """Evaluate the timing model over a core grid (pure arithmetic, deterministic)."""
    rows = []
    for x in cores_grid:
        boot, rel = timing_model(replace(inputs, cores=int(x)))
        rows.append(
            {
                "cores": int(x),
                "bootstrap_time": float(boot),
                "relative_time": float(rel),
            }
        )
    asymptote = inputs.network_sim_time / inputs.mcmle_time
    below = [row["cores"] for row in rows if row["relative_time"] < 1.0]
    summary = {
        "inputs": {
            "network_sim_time": inputs.network_sim_time,
            "mple_fit_time": inputs.mple_fit_time,
            "mcmle_time": inputs.mcmle_time,
            "replicates": inputs.replicates,
        },
        "relative_asymptote": asymptote,
        "min_cores_relative_below_1": below[0] if below else None,
        "reference_plateaus": REFERENCE_PLATEAUS,
    }
    return ExperimentReport(
        kind="timing", rows=rows, summary=summary, config=config or {}
    )


def timing_study(cfg: TimingStudyConfig) -> ExperimentReport:
    """Measure the three wall-clock inputs on a synthetic network, then model them.

    Simulation of the replicate networks and one refit per network run
    serially under a timer; the simulation-based estimator runs once. The
    measured inputs feed the closed-form curve over the core grid.
    """
    obs = sample(
        UndirectedGraph(cfg.n),
        cfg.spec,
        cfg.attrs,
        _one_sample_cfg(cfg.observed_sampler),
        rng=stream_rng(cfg.seed, _TAG_TIMING_OBS),
    ).graphs[0]
    base = mple(obs, cfg.attrs, cfg.spec)
    fitted = cfg.spec.with_theta(base.theta)
    one = _one_sample_cfg(cfg.replicate_sampler)

    t0 = time.perf_counter()
    graphs = [
        sample(obs, fitted, cfg.attrs, one, rng=stream_rng(cfg.seed, _TAG_TIMING_SIM, b)).graphs[0]
        for b in range(cfg.replicates)
    ]
    sim_time = time.perf_counter() - t0

    t0 = time.perf_counter()
    refit_failures = 0
    for gb in graphs:
        try:
            mple(gb, cfg.attrs, fitted)
        except EstimationError:
            refit_failures += 1
    fit_time = (time.perf_counter() - t0) / cfg.replicates

    mcfg = replace(cfg.mcmle, theta0=base.theta, seed=derive_seed(cfg.seed, _TAG_TIMING_MCMLE))
    t0 = time.perf_counter()
    mcmle_fit(obs, cfg.attrs, cfg.spec, mcfg)
    mcmle_time = time.perf_counter() - t0

    inputs = TimingInputs(
        network_sim_time=sim_time,
        mple_fit_time=fit_time,
        mcmle_time=mcmle_time,
        replicates=cfg.replicates,
    )
    report = timing_curve_report(inputs, cfg.cores_grid, config=_timing_config_echo(cfg))
    report.summary["observed_density"] = obs.density
    report.summary["refit_failures"] = refit_failures
    report.summary["mcmle_sample_size"] = cfg.mcmle.sample_size
    return report


# -- desk-scale defaults -----------------------------------------------------------


def _alternating_attrs(n: int, categories: int = 2, name: str = "group") -> NodeAttributes:
    return NodeAttributes(n).add(name, [i % categories for i in range(n)])


def default_coverage_config(seed: int = 0, cores: int = 1, paper_scale: bool = False) -> StudyConfig:
    """Coverage study on a homophily + triangle-closure model.

    Desk scale: 40 nodes, 200 replicates, 200 bootstrap resamples. Paper
    scale raises the replicate counts to 1000/500.
    """
    n = 40
    dyads = n * (n - 1) // 2
    spec = ModelSpec(
        (Term("edges"), Term("node_match", attr="group"), Term("gwesp", decay=0.25)),
        np.array([-3.4, 0.8, 0.5]),
    )
    replicates = 1000 if paper_scale else 200
    b = 500 if paper_scale else 200
    return StudyConfig(
        spec=spec,
        n=n,
        attrs=_alternating_attrs(n),
        replicates=replicates,
        seed=seed,
        cores=cores,
        data_sampler=SamplerConfig(burn_in=100 * dyads, interval=1),
        bootstrap=BootstrapConfig(
            replicates=b,
            sampler=SamplerConfig(burn_in=4 * dyads, interval=2 * dyads),
        ),
        mcmle=McmleConfig(
            sample_size=400,
            sampler=SamplerConfig(burn_in=10 * dyads, interval=dyads // 2),
            max_outer_rounds=2,
        ),
    )


def default_rmse_config(seed: int = 0, cores: int = 1, paper_scale: bool = False) -> StudyConfig:
    """Accuracy study on 50 nodes over an increasing Monte Carlo grid."""
    n = 50
    dyads = n * (n - 1) // 2
    spec = ModelSpec(
        (Term("edges"), Term("node_match", attr="group"), Term("gwesp", decay=0.25)),
        np.array([-3.6, 0.8, 0.5]),
    )
    grid = (25, 100, 500, 2000, 10000) if paper_scale else (25, 100, 500, 2000)
    return StudyConfig(
        spec=spec,
        n=n,
        attrs=_alternating_attrs(n),
        replicates=500 if paper_scale else 100,
        seed=seed,
        cores=cores,
        data_sampler=SamplerConfig(burn_in=20 * dyads, interval=1),
        mcmle=McmleConfig(
            sample_size=100,  # replaced per grid point
            sampler=SamplerConfig(burn_in=8 * dyads, interval=dyads // 3),
            max_outer_rounds=1,
            covariance_sample=False,
        ),
        mcmle_sample_grid=grid,
    )


def default_timing_config(seed: int = 0, paper_scale: bool = False) -> TimingStudyConfig:
    """Timing harness on a ~500-node homophily model."""
    n = 500
    spec = ModelSpec(
        (Term("edges"), Term("node_match", attr="group")),
        np.array([-3.9, 0.5]),
    )
    return TimingStudyConfig(
        spec=spec,
        n=n,
        attrs=_alternating_attrs(n),
        seed=seed,
        observed_sampler=SamplerConfig(burn_in=400_000, interval=1),
        replicate_sampler=SamplerConfig(burn_in=5_000, interval=5_000),
        replicates=500,
        mcmle=McmleConfig(
            sample_size=2000,
            sampler=SamplerConfig(burn_in=5_000, interval=5_000),
            max_outer_rounds=1,
        ),
    )


def _config_echo(cfg: StudyConfig) -> dict:
    echo = {
        "n": cfg.n,
        "model": cfg.spec.to_dict(),
        "replicates": cfg.replicates,
        "seed": cfg.seed,
        "cores": cfg.cores,
        "ci_level": cfg.ci_level,
        "truth_mode": cfg.truth_mode,
        "data_sampler": _sampler_echo(cfg.data_sampler),
        "attributes": cfg.attrs.names if cfg.attrs is not None else [],
    }
    if cfg.mcmle is not None:
        echo["mcmle"] = {
            "sample_size": cfg.mcmle.sample_size,
            "sampler": _sampler_echo(cfg.mcmle.sampler),
            "max_outer_rounds": cfg.mcmle.max_outer_rounds,
            "covariance_sample": cfg.mcmle.covariance_sample,
        }
    if cfg.bootstrap is not None:
        echo["bootstrap"] = {
            "replicates": cfg.bootstrap.replicates,
            "sampler": _sampler_echo(cfg.bootstrap.sampler),
        }
    if cfg.mcmle_sample_grid:
        echo["mcmle_sample_grid"] = list(cfg.mcmle_sample_grid)
    return echo


def _timing_config_echo(cfg: TimingStudyConfig) -> dict:
    return {
        "n": cfg.n,
        "model": cfg.spec.to_dict(),
        "seed": cfg.seed,
        "replicates": cfg.replicates,
        "observed_sampler": _sampler_echo(cfg.observed_sampler),
        "replicate_sampler": _sampler_echo(cfg.replicate_sampler),
        "mcmle_sample_size": cfg.mcmle.sample_size,
        "cores_grid": list(cfg.cores_grid),
    }


def _sampler_echo(s: SamplerConfig) -> dict:
    return {"burn_in": s.burn_in, "interval": s.interval, "num_samples": s.num_samples}
