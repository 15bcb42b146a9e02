"""Command-line surface: simulate, fit, bootstrap, diagnose, experiment.

Every run writes its primary outputs plus a ``manifest.json`` recording the
command, arguments, resolved configuration and wall clock. Primary outputs
are byte-identical across reruns with the same seed and core count; the
manifest (which carries timing) is the only file allowed to differ. Exit
codes: 0 ok, 2 usage, 3 input/parse, 4 estimation failure, 5 internal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, parametric_bootstrap
from .diagnostics import emit_plots, gof
from .errors import EstimationError, ErgmkitError, InputError
from .experiments import (
    StudyConfig,
    TimingInputs,
    coverage_study,
    default_coverage_config,
    default_rmse_config,
    default_timing_config,
    rmse_study,
    timing_curve_report,
    timing_study,
)
from .graph import NodeAttributes, UndirectedGraph
from .io import (
    read_attr_csv,
    read_edge_csv,
    read_manifest,
    read_model_config,
    read_stats_csv,
    write_edge_csv,
    write_fit_json,
    write_manifest,
    write_stats_csv,
)
from .mcmle import McmleConfig, mcmle_fit
from .mple import FitResult, mple
from .sampler import SamplerConfig, sample
from .stats import ModelSpec, global_stats

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_ESTIMATION = 4
EXIT_INTERNAL = 5

_SIG = " *"


def render_table(fits: list[FitResult]) -> str:
    """Side-by-side estimator table, one row per term.

    Normal-theory fits show Estimate / St. Error with a significance star at
    |estimate| > 1.96 standard errors; percentile fits show Lower / Upper
    with a star when the interval excludes zero.
    """
    if not fits:
        raise ValueError("no fits to render")
    names = fits[0].term_names
    for f in fits[1:]:
        if f.term_names != names:
            raise ValueError(f"term lists differ: {names} vs {f.term_names}")

    headers = ["Term"]
    subheaders = [""]
    for f in fits:
        headers += [_estimator_label(f.estimator), ""]
        if f.estimator == "bootstrap_mple":
            subheaders += ["Lower Bound", "Upper Bound"]
        else:
            subheaders += ["Estimate", "St. Error"]
    body = []
    for t, name in enumerate(names):
        row = [name]
        for f in fits:
            if f.estimator == "bootstrap_mple":
                lo, hi = f.ci[t]
                star = _SIG if (lo > 0 or hi < 0) else ""
                row += [f"{lo:.3f}", f"{hi:.3f}{star}"]
            else:
                est, se = f.theta[t], f.std_errors[t]
                star = _SIG if (se > 0 and abs(est / se) > 1.96) else ""
                row += [f"{est:.3f}", f"{se:.3f}{star}"]
        body.append(row)

    widths = [
        max(len(r[c]) for r in [headers, subheaders, *body]) for c in range(len(headers))
    ]
    lines = []
    for r in (headers, subheaders, *body):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    lines.insert(2, "-" * len(max(lines, key=len)))
    return "\n".join(lines) + "\n"


def _estimator_label(kind: str) -> str:
    return {
        "mple": "Logistic Regression",
        "mcmle": "MCMLE",
        "bootstrap_mple": "Bootstrapped MPLE",
        "exact_mle": "Exact MLE",
    }.get(kind, kind)


# -- argument plumbing -----------------------------------------------------------


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise InputError(f"environment variable {name}={raw!r} is not an integer") from e


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = _env_int("ERGMKIT_SEED")
    return env if env is not None else 0

def _resolve_cores(args) -> int:
    if getattr(args, "cores", None) is not None:
        return args.cores
    env = _env_int("ERGMKIT_CORES")
    return env if env is not None else 1


def _load_inputs(args, need_graph=True):
    spec = read_model_config(args.model)
    if getattr(args, "theta", None):
        try:
            theta = np.array([float(x) for x in args.theta.split(",")])
        except ValueError as e:
            raise InputError(f"--theta must be a comma-separated float list: {e}") from e
        spec = spec.with_theta(theta)
    g = None
    mapping = None
    if getattr(args, "graph", None):
        g, mapping = read_edge_csv(args.graph, n=getattr(args, "nodes", None))
    elif need_graph and getattr(args, "nodes", None):
        g = UndirectedGraph(args.nodes)
    elif need_graph:
        raise InputError("provide --graph or --nodes")
    attrs = None
    if getattr(args, "attrs", None):
        attrs = read_attr_csv(args.attrs, n=g.n if g is not None else None)
    _check_spec_attrs(spec, attrs)
    return g, attrs, spec, mapping


def _check_spec_attrs(spec: ModelSpec, attrs: NodeAttributes | None):
    for term in spec.terms:
        if term.attr is not None:
            if attrs is None or term.attr not in attrs:
                raise InputError(
                    f"term {term.name!r} references attribute {term.attr!r} "
                    "but no such column was loaded (use --attrs)"
                )


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sampler_from_args(args, num_samples=1, retain=False) -> SamplerConfig:
    return SamplerConfig(
        burn_in=args.burn_in,
        interval=args.interval,
        num_samples=num_samples,
        retain_graphs=retain,
    )


# -- subcommands -------------------------------------------------------------------


def _cmd_simulate(args, argv) -> int:
    t0 = time.perf_counter()
    g, attrs, spec, _ = _load_inputs(args)
    seed = _resolve_seed(args)
    cfg = _sampler_from_args(args, num_samples=args.samples, retain=args.retain_graphs)
    cfg = replace(cfg, seed=seed)
    out = _out_dir(args)
    res = sample(g, spec, attrs, cfg)
    outputs = ["sample_stats.csv"]
    write_stats_csv(out / "sample_stats.csv", res.stats, spec.term_names, res.densities)
    if args.retain_graphs:
        gdir = out / "graphs"
        gdir.mkdir(exist_ok=True)
        for k, gk in enumerate(res.graphs):
            write_edge_csv(gdir / f"sample_{k}.csv", gk)
            outputs.append(f"graphs/sample_{k}.csv")
    write_manifest(
        out,
        "simulate",
        argv,
        {
            "model": spec.to_dict(),
            "seed": seed,
            "burn_in": cfg.burn_in,
            "interval": cfg.interval,
            "samples": cfg.num_samples,
            "acceptance_rate": res.acceptance_rate,
        },
        outputs,
        time.perf_counter() - t0,
    )
    return EXIT_OK


def _cmd_fit_mple(args, argv) -> int:
    t0 = time.perf_counter()
    g, attrs, spec, _ = _load_inputs(args)
    out = _out_dir(args)
    fit = mple(g, attrs, spec)
    write_fit_json(out / "fit_mple.json", fit, {"manifest": "manifest.json"})
    (out / "fit_mple.txt").write_text(render_table([fit]))
    write_manifest(
        out,
        "fit-mple",
        argv,
        {"model": spec.to_dict(), "seed": _resolve_seed(args)},
        ["fit_mple.json", "fit_mple.txt"],
        time.perf_counter() - t0,
    )
    return EXIT_OK


def _cmd_fit_mcmle(args, argv) -> int:
    t0 = time.perf_counter()
    g, attrs, spec, _ = _load_inputs(args)
    seed = _resolve_seed(args)
    cores = _resolve_cores(args)
    cfg = McmleConfig(
        sample_size=args.sample_size,
        sampler=_sampler_from_args(args),
        max_outer_rounds=args.rounds,
        chains=cores,
        cores=cores,
        seed=seed,
    )
    out = _out_dir(args)
    fit = mcmle_fit(g, attrs, spec, cfg)
    write_fit_json(out / "fit_mcmle.json", fit, {"manifest": "manifest.json"})
    (out / "fit_mcmle.txt").write_text(render_table([fit]))
    write_manifest(
        out,
        "fit-mcmle",
        argv,
        {
            "model": spec.to_dict(),
            "seed": seed,
            "cores": cores,
            "sample_size": args.sample_size,
            "burn_in": args.burn_in,
            "interval": args.interval,
            "rounds": args.rounds,
        },
        ["fit_mcmle.json", "fit_mcmle.txt"],
        time.perf_counter() - t0,
    )
    return EXIT_OK


def _cmd_bootstrap(args, argv) -> int:
    t0 = time.perf_counter()
    g, attrs, spec, _ = _load_inputs(args)
    seed = _resolve_seed(args)
    cores = _resolve_cores(args)
    cfg = BootstrapConfig(
        replicates=args.replicates,
        sampler=_sampler_from_args(args),
        ci_level=args.level,
        cores=cores,
        seed=seed,
    )
    out = _out_dir(args)
    res = parametric_bootstrap(g, attrs, spec, cfg)
    write_fit_json(
        out / "bootstrap.json",
        res.fit,
        {
            "manifest": "manifest.json",
            "replicates_requested": res.replicates_requested,
            "replicates_used": res.n_success,
            "failures": [{"replicate": b, "reason": r} for b, r in res.failures],
            "base_fit": res.base_fit.to_dict(),
        },
    )
    write_stats_csv(out / "replicates.csv", res.replicate_thetas, spec.term_names)
    write_stats_csv(out / "replicate_stats.csv", res.replicate_stats, spec.term_names)
    (out / "bootstrap.txt").write_text(render_table([res.base_fit, res.fit]))
    write_manifest(
        out,
        "bootstrap",
        argv,
        {
            "model": spec.to_dict(),
            "seed": seed,
            "cores": cores,
            "replicates": args.replicates,
            "level": args.level,
            "burn_in": args.burn_in,
            "interval": args.interval,
        },
        ["bootstrap.json", "bootstrap.txt", "replicates.csv", "replicate_stats.csv"],
        time.perf_counter() - t0,
    )
    return EXIT_OK


def _cmd_diagnose(args, argv) -> int:
    t0 = time.perf_counter()
    g, attrs, spec, _ = _load_inputs(args)
    stats, names, densities = read_stats_csv(args.stats)
    if list(names) != list(spec.term_names):
        raise InputError(
            f"statistics columns {names} do not match model terms {list(spec.term_names)}"
        )
    if densities is None:
        raise InputError(f"{args.stats}: no density column; regenerate with 'simulate'")
    obs = global_stats(g, attrs, spec)
    out = _out_dir(args)
    report = gof(stats, obs, densities, g.density, term_names=list(names))
    files = emit_plots(report, out, svg=args.svg)
    with open(out / "gof.json", "w") as fh:
        doc = report.to_dict()
        doc["manifest"] = "manifest.json"
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs = [f.name if f.parent == out else str(f.relative_to(out)) for f in files]
    outputs.append("gof.json")
    write_manifest(
        out,
        "diagnose",
        argv,
        {"model": spec.to_dict(), "stats": str(args.stats), "seed": _resolve_seed(args)},
        outputs,
        time.perf_counter() - t0,
    )
    return EXIT_OK


def _cmd_experiment(args, argv) -> int:
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    cores = _resolve_cores(args)
    out = _out_dir(args)
    kind = args.study
    if kind == "rmse":
        cfg = default_rmse_config(seed=seed, cores=cores, paper_scale=args.paper_scale)
        cfg = _apply_study_overrides(cfg, args)
        report = rmse_study(cfg)
    elif kind == "coverage":
        cfg = default_coverage_config(seed=seed, cores=cores, paper_scale=args.paper_scale)
        cfg = _apply_study_overrides(cfg, args)
        report = coverage_study(cfg)
    elif kind == "timing":
        if args.inputs:
            try:
                sim, fit, mc, b = (float(x) for x in args.inputs.split(","))
            except ValueError as e:
                raise InputError(
                    "--inputs expects 'sim_time,fit_time,mcmle_time,replicates'"
                ) from e
            inputs = TimingInputs(sim, fit, mc, replicates=int(b))
            report = timing_curve_report(
                inputs, (1, 2, 4, 8, 16, 32, 64, 128, 500), config={"seed": seed}
            )
        else:
            tcfg = default_timing_config(seed=seed, paper_scale=args.paper_scale)
            report = timing_study(tcfg)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown study {kind!r}")
    report.to_csv(out / f"{kind}_rows.csv")
    report.to_json(out / f"{kind}_summary.json")
    write_manifest(
        out,
        f"experiment {kind}",
        argv,
        {"seed": seed, "cores": cores, "study": kind, "config": report.config},
        [f"{kind}_rows.csv", f"{kind}_summary.json"],
        time.perf_counter() - t0,
    )
    return EXIT_OK


def _apply_study_overrides(cfg: StudyConfig, args) -> StudyConfig:
    if args.replicates is not None:
        cfg = replace(cfg, replicates=args.replicates)
    return cfg


def _cmd_rerun(args, argv) -> int:
    doc = read_manifest(args.manifest)
    stored = list(doc["argv"])
    if args.output_dir is not None:
        stored = _override_output_dir(stored, args.output_dir)
    return parse_and_dispatch(stored)


def _override_output_dir(stored_argv: list[str], out: str) -> list[str]:
    out_args = list(stored_argv)
    for k, tok in enumerate(out_args):
        if tok == "--output-dir" and k + 1 < len(out_args):
            out_args[k + 1] = out
            return out_args
        if tok.startswith("--output-dir="):
            out_args[k] = f"--output-dir={out}"
            return out_args
    return out_args + ["--output-dir", out]


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ergmkit",
        description="Fit, simulate and bootstrap exponential random graph models.",
    )
    p.add_argument("--version", action="version", version=f"ergmkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common_io(sp, need_model=True):
        sp.add_argument("--graph", help="edge-list CSV (source,target)")
        sp.add_argument("--nodes", type=int, help="node count (empty start / size override)")
        sp.add_argument("--attrs", help="node attribute CSV (node,<name>...)")
        if need_model:
            sp.add_argument("--model", required=True, help="model config JSON")
        sp.add_argument("--output-dir", default=".", help="directory for outputs")
        sp.add_argument("--seed", type=int, default=None, help="master RNG seed")

    sp = sub.add_parser("simulate", help="draw networks from a model at fixed coefficients")
    common_io(sp)
    sp.add_argument("--theta", help="override coefficients, comma separated")
    sp.add_argument("--burn-in", type=int, default=300_000)
    sp.add_argument("--interval", type=int, default=30_000)
    sp.add_argument("--samples", type=int, default=1)
    sp.add_argument("--retain-graphs", action="store_true")
    sp.set_defaults(fn=_cmd_simulate)

    sp = sub.add_parser("fit-mple", help="maximum pseudolikelihood fit")
    common_io(sp)
    sp.set_defaults(fn=_cmd_fit_mple)

    sp = sub.add_parser("fit-mcmle", help="Monte Carlo maximum likelihood fit")
    common_io(sp)
    sp.add_argument("--sample-size", type=int, default=1000)
    sp.add_argument("--burn-in", type=int, default=300_000)
    sp.add_argument("--interval", type=int, default=30_000)
    sp.add_argument("--rounds", type=int, default=3)
    sp.add_argument("--cores", type=int, default=None)
    sp.set_defaults(fn=_cmd_fit_mcmle)

    sp = sub.add_parser("bootstrap", help="parametric bootstrap around the MPLE")
    common_io(sp)
    sp.add_argument("--replicates", type=int, default=500)
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--burn-in", type=int, default=300_000)
    sp.add_argument("--interval", type=int, default=30_000)
    sp.add_argument("--cores", type=int, default=None)
    sp.set_defaults(fn=_cmd_bootstrap)

    sp = sub.add_parser("diagnose", help="degeneracy / fit diagnostics from a stats CSV")
    common_io(sp)
    sp.add_argument("--stats", required=True, help="statistics CSV from 'simulate'")
    sp.add_argument("--svg", action="store_true", help="also render gof.svg")
    sp.set_defaults(fn=_cmd_diagnose)

    sp = sub.add_parser("experiment", help="simulation studies")
    sp.add_argument("study", choices=["rmse", "coverage", "timing"])
    sp.add_argument("--output-dir", default=".")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--cores", type=int, default=None)
    sp.add_argument("--replicates", type=int, default=None, help="override replicate count")
    sp.add_argument("--paper-scale", action="store_true", help="full-size replicate counts")
    sp.add_argument(
        "--inputs",
        help="timing only: 'sim_time,fit_time,mcmle_time,replicates' skips measurement",
    )
    sp.set_defaults(fn=_cmd_experiment)

    sp = sub.add_parser("rerun", help="re-dispatch a recorded run from its manifest")
    sp.add_argument("manifest")
    sp.add_argument("--output-dir", default=None)
    sp.set_defaults(fn=_cmd_rerun)
    return p


def parse_and_dispatch(argv: list[str]) -> int:
    """Route argv to a subcommand; map errors onto stable exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        return args.fn(args, argv)
    except InputError as e:
        print(f"ergmkit: error: input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except EstimationError as e:
        print(f"ergmkit: error: estimation: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ESTIMATION
    except ErgmkitError as e:  # pragma: no cover - currently unreachable
        print(f"ergmkit: error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"ergmkit: error: internal: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
