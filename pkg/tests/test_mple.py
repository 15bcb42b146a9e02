import math

import numpy as np
import pytest

from ergmkit.errors import SeparationDiverged
from ergmkit.graph import NodeAttributes, UndirectedGraph, random_graph
from ergmkit.mcmle import exact_mle
from ergmkit.mple import dyad_rows, fit_logistic, mple
from ergmkit.sampler import SamplerConfig, sample, stream_rng
from ergmkit.stats import ModelSpec, Term, brute_force_change

EDGES = ModelSpec((Term("edges"),))


def _attrs2(n):
    return NodeAttributes(n).add("grp", [i % 2 for i in range(n)])


def test_dyad_rows_count_and_order():
    g = random_graph(6, 0.4, 0)
    rows = list(dyad_rows(g, None, EDGES))
    assert len(rows) == 15
    # canonical order (0,1), (0,2), ..., (4,5)
    ys = [y for y, _ in rows]
    want = [int(g.has_edge(i, j)) for i in range(5) for j in range(i + 1, 6)]
    assert ys == want


def test_dyad_rows_three_nodes():
    rows = list(dyad_rows(UndirectedGraph(3), None, EDGES))
    assert len(rows) == 3
    assert all(x == [1.0] for _, x in rows)


def test_dyad_rows_match_brute_force_on_triangle():
    g = UndirectedGraph.from_edge_list(3, [(0, 1), (1, 2), (0, 2)])
    spec = ModelSpec((Term("esp", k=1),))
    for (y, x), (i, j) in zip(dyad_rows(g, None, spec), [(0, 1), (0, 2), (1, 2)]):
        assert y == 1
        assert x[0] == brute_force_change(g, None, spec, i, j)[0]


def test_single_edge_closed_form():
    # edges-only MPLE is the logit of density: n=3 with one edge -> log(1/2)
    g = UndirectedGraph.from_edge_list(3, [(0, 1)])
    fit = mple(g, None, EDGES)
    assert fit.theta[0] == pytest.approx(math.log((1 / 3) / (2 / 3)), abs=1e-6)
    assert fit.converged
    assert fit.max_abs_gradient <= 1e-8


def test_density_logit_closed_form_larger():
    g = random_graph(25, 0.2, 3)
    fit = mple(g, None, EDGES)
    d = g.density
    assert fit.theta[0] == pytest.approx(math.log(d / (1 - d)), abs=1e-8)


def test_empty_graph_separates():
    with pytest.raises(SeparationDiverged):
        mple(UndirectedGraph(6), None, EDGES)


def test_complete_graph_separates():
    with pytest.raises(SeparationDiverged):
        mple(random_graph(6, 1.0, 0), None, EDGES)


def test_fit_logistic_rejects_empty_and_zero_design():
    with pytest.raises(ValueError):
        fit_logistic([])
    with pytest.raises(ValueError):
        fit_logistic([(1, [0.0]), (0, [0.0])])


def test_mple_equals_fit_logistic_on_rows():
    g = random_graph(12, 0.3, 9)
    attrs = _attrs2(12)
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp"), Term("gwesp", decay=0.25)))
    a = mple(g, attrs, spec)
    b = fit_logistic(dyad_rows(g, attrs, spec))
    assert np.allclose(a.theta, b.theta, atol=1e-9)
    assert np.allclose(a.covariance, b.covariance, atol=1e-9)


def test_matches_exact_mle_for_dyad_independent_model():
    # for dyad-independent terms the pseudolikelihood is the likelihood, so
    # the fit must agree with the full-enumeration MLE
    attrs = NodeAttributes(5).add("grp", ["a", "a", "b", "b", "a"])
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp")))
    g = UndirectedGraph.from_edge_list(5, [(0, 1), (0, 4), (2, 3), (1, 2), (0, 3)])
    fit = mple(g, attrs, spec)
    oracle = exact_mle(g, attrs, spec)
    assert np.allclose(fit.theta, oracle.theta, atol=1e-6)


def test_invariant_under_node_relabeling():
    rng = np.random.default_rng(17)
    g = random_graph(14, 0.25, rng)
    attrs = _attrs2(14)
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp"), Term("esp", k=1)))
    fit = mple(g, attrs, spec)
    perm = rng.permutation(14)
    gp = UndirectedGraph(14)
    for i, j in g.edges():
        gp.add_edge(int(perm[i]), int(perm[j]))
    grp = [0] * 14
    for v in range(14):
        grp[int(perm[v])] = v % 2
    fit_p = mple(gp, NodeAttributes(14).add("grp", grp), spec)
    assert np.allclose(fit.theta, fit_p.theta, atol=1e-9)


def test_gradient_at_optimum_is_tiny():
    g = random_graph(20, 0.2, 5)
    attrs = _attrs2(20)
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp"), Term("gwesp", decay=0.25)))
    fit = mple(g, attrs, spec)
    assert fit.max_abs_gradient <= 1e-8


def test_doubled_columns_halve_coefficients():
    g = random_graph(15, 0.3, 8)
    attrs = _attrs2(15)
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp")))
    rows = list(dyad_rows(g, attrs, spec))
    fit = fit_logistic(rows)
    doubled = fit_logistic([(y, [2 * v for v in x]) for y, x in rows])
    assert np.allclose(doubled.theta, fit.theta / 2, atol=1e-8)


def test_loglik_nondecreasing_and_std_errors_consistent():
    # second independent accumulation of sqrt(diag((X^T W X)^-1)) at theta_hat
    g = random_graph(18, 0.25, 13)
    attrs = _attrs2(18)
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp"), Term("esp", k=1)))
    fit = mple(g, attrs, spec)
    rows = list(dyad_rows(g, attrs, spec))
    X = np.array([x for _, x in rows])
    eta = X @ fit.theta
    w = 1.0 / (1.0 + np.exp(-eta))
    w = w * (1.0 - w)
    info = (X * w[:, None]).T @ X
    se = np.sqrt(np.diag(np.linalg.inv(info)))
    assert np.allclose(se, fit.std_errors, rtol=1e-8)


def test_ci_is_normal_approximation():
    g = random_graph(20, 0.3, 2)
    fit = mple(g, None, EDGES)
    assert fit.ci[0, 0] == pytest.approx(fit.theta[0] - 1.96 * fit.std_errors[0])
    assert fit.ci[0, 1] == pytest.approx(fit.theta[0] + 1.96 * fit.std_errors[0])


def test_median_estimates_track_truth_over_replicates():
    # simulate a small batch at known coefficients and check median bias
    n = 30
    attrs = _attrs2(n)
    spec = ModelSpec(
        (Term("edges"), Term("node_match", attr="grp"), Term("gwesp", decay=0.25)),
        np.array([-2.8, 0.6, 0.3]),
    )
    ests = []
    for r in range(40):
        g = sample(
            UndirectedGraph(n),
            spec,
            attrs,
            SamplerConfig(burn_in=40 * 435, interval=1, num_samples=1, retain_graphs=True),
            rng=stream_rng(71, r),
        ).graphs[0]
        ests.append(mple(g, attrs, spec).theta)
    med = np.median(np.array(ests), axis=0)
    assert np.all(np.abs(med - spec.theta) < 0.25)
