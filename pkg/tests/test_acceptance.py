"""End-to-end acceptance checks.

One test per headline criterion, each printing a PASS line with its measured
numbers after the assertions hold. The two study-backed checks (coverage/bias
and the RMSE trend) run desk-scale simulation studies and take tens of
minutes on one core; everything else is seconds to a couple of minutes.
"""

import math
import sys

import numpy as np
import pytest
from scipy.stats import chisquare

from ergmkit.diagnostics import gof
from ergmkit.experiments import (
    TimingInputs,
    coverage_study,
    default_coverage_config,
    default_rmse_config,
    default_timing_config,
    rmse_study,
    timing_model,
    timing_study,
)
from ergmkit.graph import NodeAttributes, UndirectedGraph, random_graph
from ergmkit.mcmle import McmleConfig, exact_mle, mcmle_fit
from ergmkit.mple import mple
from ergmkit.sampler import SamplerConfig, sample
from ergmkit.stats import (
    ModelSpec,
    Term,
    altkstar_alternating_sum,
    altkstar_degree_form,
    brute_force_change,
    change_stats,
    global_stats,
)

EDGES = ModelSpec((Term("edges"),))


def _report(line: str) -> None:
    print(line, file=sys.__stdout__, flush=True)


# -- 1. exact-likelihood oracle agreement ---------------------------------------------


def test_criterion_1_exact_oracle_agreement():
    spec_ks = ModelSpec((Term("edges"), Term("k_star", k=2)))
    g = UndirectedGraph.from_edge_list(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])
    oracle = exact_mle(g, None, spec_ks)
    cfg = McmleConfig(
        sample_size=5000,
        sampler=SamplerConfig(burn_in=500, interval=30),
        max_outer_rounds=4,
        seed=42,
    )
    fit = mcmle_fit(g, None, spec_ks, cfg)
    gap = float(np.max(np.abs(fit.theta - oracle.theta)))
    assert gap < 0.05

    attrs = NodeAttributes(5).add("grp", ["a", "a", "b", "b", "a"])
    spec_m = ModelSpec((Term("edges"), Term("node_match", attr="grp")))
    g2 = UndirectedGraph.from_edge_list(5, [(0, 1), (0, 4), (2, 3), (1, 2), (0, 3)])
    mp = mple(g2, attrs, spec_m)
    ex = exact_mle(g2, attrs, spec_m)
    gap2 = float(np.max(np.abs(mp.theta - ex.theta)))
    assert gap2 < 1e-6
    _report(
        f"ACCEPTANCE 1 PASS exact-oracle: mcmle within {gap:.4f} (<0.05), "
        f"dyad-independent mple within {gap2:.2e} (<1e-6)"
    )


# -- 2. sampler correctness ------------------------------------------------------------


def test_criterion_2_sampler_distribution():
    # theta=0, n=4: thinned edge counts vs Binomial(6, 1/2); odd interval
    # because at theta=0 every proposal is accepted and parity alternates
    cfg = SamplerConfig(burn_in=1000, interval=11, num_samples=100_000, seed=29)
    res = sample(UndirectedGraph(4), EDGES, None, cfg)
    counts = np.bincount(res.stats[:, 0].astype(int), minlength=7)
    probs = np.array([math.comb(6, k) for k in range(7)]) / 64.0
    _, pvalue = chisquare(counts, probs * counts.sum())
    assert pvalue > 0.001

    # fitted n=5 model: sample means vs exact enumerated expectations
    from ergmkit.mcmle import enumerate_stat_matrix, exact_expectations

    spec = ModelSpec((Term("edges"), Term("k_star", k=2)))
    g_obs = UndirectedGraph.from_edge_list(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])
    theta = mple(g_obs, None, spec).theta
    M = enumerate_stat_matrix(5, None, spec)
    want = exact_expectations(theta, M)
    res2 = sample(
        g_obs,
        spec.with_theta(theta),
        None,
        SamplerConfig(burn_in=2000, interval=41, num_samples=30_000, seed=31),
    )
    got = res2.stats.mean(axis=0)
    se = res2.stats.std(axis=0, ddof=1) / math.sqrt(res2.stats.shape[0])
    z = np.abs(got - want) / np.maximum(se, 1e-9)
    assert np.all(z < 3.0), (got, want, z)
    _report(
        f"ACCEPTANCE 2 PASS sampler: chi-square p={pvalue:.4f} (>0.001), "
        f"fitted-model mean z={z.max():.2f} (<3)"
    )


# -- 3. change-statistic oracle ----------------------------------------------------------


def test_criterion_3_change_statistic_oracle():
    per_kind = {
        "edges": ModelSpec((Term("edges"),)),
        "node_match": ModelSpec((Term("node_match", attr="grp"),)),
        "node_cov": ModelSpec((Term("node_cov", attr="x"),)),
        "esp": ModelSpec((Term("esp", k=1), Term("esp", k=2))),
        "k_star": ModelSpec((Term("k_star", k=2), Term("k_star", k=3))),
        "gwesp": ModelSpec((Term("gwesp", decay=0.25),)),
        "alt_k_star": ModelSpec((Term("alt_k_star", weight=2.0),)),
        "gwd": ModelSpec((Term("gwd", weight=1.5),)),
        "degree_count": ModelSpec((Term("degree_count", k=2),)),
    }
    geometric = {"gwesp", "alt_k_star", "gwd"}
    rng = np.random.default_rng(7)
    checked = 0
    for kind, spec in per_kind.items():
        for _ in range(1000):
            n = int(rng.integers(3, 16))
            g = random_graph(n, rng.random(), rng)
            attrs = (
                NodeAttributes(n)
                .add("grp", (rng.integers(0, 3, n)).tolist())
                .add("x", rng.normal(size=n))
            )
            i = int(rng.integers(0, n))
            j = int(rng.integers(0, n - 1))
            j += j >= i
            got = np.array(change_stats(g, attrs, spec, i, j))
            want = brute_force_change(g, attrs, spec, i, j)
            if kind in geometric:
                assert np.all(np.abs(got - want) <= 1e-9), (kind, n, i, j)
            else:
                assert np.array_equal(got, want), (kind, n, i, j)
            checked += 1
    _report(f"ACCEPTANCE 3 PASS change-statistics: {checked} randomized cases exact")


# -- 4. alternating k-star identity ---------------------------------------------------------


def test_criterion_4_altkstar_identity():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 13))
        g = random_graph(n, rng.random(), rng)
        for lam in (1.5, 2.0, math.exp(0.4975)):
            a = altkstar_degree_form(g, lam)
            b = altkstar_alternating_sum(g, lam)
            worst = max(worst, abs(a - b))
    assert worst <= 1e-9

    # the opposite-sign degree form is demonstrably wrong on the 3-path
    path3 = UndirectedGraph.from_edge_list(3, [(0, 1), (1, 2)])
    lam = 2.0
    gwd = global_stats(path3, None, ModelSpec((Term("gwd", weight=lam),)))[0]
    wrong = lam * (gwd + 2 * path3.edge_count)
    right = altkstar_alternating_sum(path3, lam)
    assert wrong == pytest.approx(15.0)
    assert right == pytest.approx(1.0)
    _report(
        f"ACCEPTANCE 4 PASS alternating-k-star: max |degree-form - sum| = {worst:.2e} "
        f"(<=1e-9); flipped-sign witness {wrong:.0f} vs {right:.0f}"
    )


# -- 5 & 6. coverage and bias (shared desk-scale study) -----------------------------------------


@pytest.fixture(scope="module")
def coverage_report():
    return coverage_study(default_coverage_config(seed=0))


def test_criterion_5_coverage(coverage_report):
    cov = coverage_report.summary["coverage"]
    boot = cov["bootstrap_mple"]
    naive = cov["mple"]
    for term, value in boot.items():
        assert value is not None and 0.90 <= value <= 0.99, (term, value)
    gw = [t for t in boot if t.startswith("gwesp")][0]
    assert naive[gw] < boot[gw]
    _report(
        "ACCEPTANCE 5 PASS coverage: bootstrap "
        + ", ".join(f"{t}={v:.3f}" for t, v in boot.items())
        + f"; naive {gw}={naive[gw]:.3f} < bootstrap {boot[gw]:.3f}"
    )


def test_criterion_6_bias_pattern(coverage_report):
    bias = coverage_report.summary["mple_bias"]
    lines = []
    for term, b in bias.items():
        band = 2.0 * b["iqr"] / math.sqrt(b["n"])
        assert abs(b["median"]) <= band, (term, b, band)
        lines.append(f"{term}: |{b['median']:.4f}| <= {band:.4f}")
    _report("ACCEPTANCE 6 PASS bias: " + "; ".join(lines))


# -- 7. RMSE trend ---------------------------------------------------------------------------


def test_criterion_7_rmse_trend():
    report = rmse_study(default_rmse_config(seed=1))
    trend = report.summary["trend"]
    lines = []
    for term, tr in trend.items():
        assert tr["spearman_vs_sample_size"] < 0, (term, tr)
        assert tr["sign_change_pos_to_neg"], (term, tr)
        lines.append(f"{term}: rho={tr['spearman_vs_sample_size']:.2f}")
    _report(
        "ACCEPTANCE 7 PASS rmse-trend: "
        + "; ".join(lines)
        + f" over grid {report.summary['sample_grid']}"
    )


# -- 8. timing model ----------------------------------------------------------------------------


def test_criterion_8_timing_model():
    # closed form
    boot, rel = timing_model(TimingInputs(10.0, 1.0, 100.0, replicates=500, cores=500))
    assert boot == pytest.approx(11.0) and rel == pytest.approx(0.11)
    # monotone non-increasing with asymptote sim/mcmle
    rels = [
        timing_model(TimingInputs(7.0, 0.3, 60.0, replicates=500, cores=x))[1]
        for x in (1, 2, 4, 8, 32, 128, 10_000)
    ]
    assert all(a >= b for a, b in zip(rels, rels[1:]))
    assert rels[-1] == pytest.approx(7.0 / 60.0, rel=1e-2)
    assert all(r >= 7.0 / 60.0 for r in rels)

    # measured harness on a ~500-node synthetic network
    report = timing_study(default_timing_config(seed=0))
    by_cores = {r["cores"]: r["relative_time"] for r in report.rows}
    assert by_cores[4] < 1.0
    assert report.summary["reference_plateaus"] == {"small": 0.20, "medium": 0.17, "large": 0.20}
    _report(
        f"ACCEPTANCE 8 PASS timing: closed form exact; measured relative at 4 cores "
        f"= {by_cores[4]:.3f} (<1); inputs {report.summary['inputs']}"
    )


# -- 9. degeneracy flags -----------------------------------------------------------------------


def test_criterion_9_degeneracy_flags():
    g_obs = random_graph(100, 0.1, 1)
    obs_stats = global_stats(g_obs, None, EDGES)

    def run(theta, seed):
        res = sample(
            g_obs,
            EDGES.with_theta([theta]),
            None,
            SamplerConfig(burn_in=60_000, interval=400, num_samples=50, seed=seed),
        )
        return gof(res.stats, obs_stats, res.densities, g_obs.density, term_names=["edges"])

    full = run(5.0, 2)
    assert full.degenerate_full and not full.degenerate_empty
    empty = run(-12.0, 3)
    assert empty.degenerate_empty and not empty.degenerate_full

    theta_hat = float(mple(g_obs, None, EDGES).theta[0])
    clean = 0
    reruns = 20
    for s in range(reruns):
        rep = run(theta_hat, 100 + s)
        if not rep.flagged:
            clean += 1
    assert clean >= 0.95 * reruns
    _report(
        f"ACCEPTANCE 9 PASS degeneracy: full flag at +5, empty flag at -12, "
        f"{clean}/{reruns} fitted reruns unflagged"
    )


# -- 10. determinism ------------------------------------------------------------------------------


def test_criterion_10_subcommand_determinism(tmp_path):
    from ergmkit.cli import parse_and_dispatch
    from ergmkit.io import write_attr_csv, write_edge_csv, write_model_config

    g = random_graph(20, 0.2, 3)
    write_edge_csv(tmp_path / "g.csv", g)
    write_attr_csv(tmp_path / "a.csv", NodeAttributes(20).add("grp", [i % 2 for i in range(20)]))
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp")), np.array([-1.5, 0.4]))
    write_model_config(tmp_path / "m.json", spec)
    gam = ["--graph", str(tmp_path / "g.csv"), "--attrs", str(tmp_path / "a.csv"),
           "--model", str(tmp_path / "m.json")]

    runs = {
        "simulate": gam + ["--burn-in", "1000", "--interval", "100", "--samples", "8",
                            "--seed", "5"],
        "fit-mple": gam,
        "fit-mcmle": gam + ["--sample-size", "200", "--burn-in", "1000", "--interval", "60",
                             "--rounds", "2", "--seed", "5"],
        "bootstrap": gam + ["--replicates", "10", "--burn-in", "800", "--interval", "200",
                             "--seed", "5"],
        "experiment": ["timing", "--inputs", "10,1,100,500", "--seed", "5"],
    }
    primary = {
        "simulate": ["sample_stats.csv"],
        "fit-mple": ["fit_mple.json", "fit_mple.txt"],
        "fit-mcmle": ["fit_mcmle.json", "fit_mcmle.txt"],
        "bootstrap": ["bootstrap.json", "replicates.csv", "replicate_stats.csv", "bootstrap.txt"],
        "experiment": ["timing_rows.csv", "timing_summary.json"],
    }
    checked = []
    for cmd, args in runs.items():
        digests = []
        for rep in ("x", "y"):
            out = tmp_path / f"{cmd}-{rep}"
            argv = ([cmd] + args + ["--output-dir", str(out)]) if cmd != "experiment" else (
                [cmd] + args + ["--output-dir", str(out)]
            )
            assert parse_and_dispatch(argv) == 0, cmd
            digests.append([(p, (out / p).read_bytes()) for p in primary[cmd]])
        assert digests[0] == digests[1], f"{cmd} outputs differ between identical runs"
        checked.append(cmd)
    # diagnose consumes simulate output; check it as well
    sim_out = tmp_path / "simulate-x"
    outs = []
    for rep in ("dx", "dy"):
        out = tmp_path / rep
        assert parse_and_dispatch(
            ["diagnose"] + gam + ["--stats", str(sim_out / "sample_stats.csv"),
                                   "--output-dir", str(out)]
        ) == 0
        outs.append((out / "gof.json").read_bytes() + (out / "trace_edges.csv").read_bytes())
    assert outs[0] == outs[1]
    checked.append("diagnose")
    _report(f"ACCEPTANCE 10 PASS determinism: byte-identical reruns for {', '.join(checked)}")
