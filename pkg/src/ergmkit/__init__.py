"""Estimation, simulation and bootstrap inference for exponential random
graph models on undirected networks."""

from .bootstrap import BootstrapConfig, BootstrapResult, parametric_bootstrap, percentile_ci
from .diagnostics import GofReport, emit_plots, gof
from .errors import (
    BaseFitFailed,
    DegenerateSample,
    ErgmkitError,
    EstimationError,
    InputError,
    MissingAttribute,
    NonConvergence,
    SeparationDiverged,
    TooManyReplicateFailures,
)
from .experiments import (
    ExperimentReport,
    StudyConfig,
    TimingInputs,
    coverage_study,
    log_relative_rmse,
    rmse,
    rmse_study,
    timing_model,
    timing_study,
)
from .graph import NodeAttributes, UndirectedGraph, random_graph
from .mcmle import (
    McmleConfig,
    McmleFit,
    approx_loglik_ratio,
    approx_score,
    exact_expectations,
    exact_log_normalizer,
    exact_mle,
    enumerate_stat_matrix,
    mcmle_fit,
)
from .mple import FitResult, dyad_rows, fit_logistic, mple
from .sampler import ChainState, SampleResult, SamplerConfig, sample, stream_rng
from .stats import (
    ModelSpec,
    Term,
    altkstar_alternating_sum,
    altkstar_degree_form,
    brute_force_change,
    change_stats,
    global_stats,
)

__version__ = "0.1.0"
