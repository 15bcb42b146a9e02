import json

import numpy as np
import pytest

from ergmkit.cli import (
    EXIT_ESTIMATION,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_USAGE,
    parse_and_dispatch,
    render_table,
)
from ergmkit.graph import NodeAttributes, random_graph
from ergmkit.io import write_attr_csv, write_edge_csv, write_model_config
from ergmkit.mple import FitResult
from ergmkit.stats import ModelSpec, Term


def _fit(estimator, theta, se=None, ci=None, names=("edges",)):
    theta = np.asarray(theta, dtype=float)
    q = theta.shape[0]
    se = np.asarray(se if se is not None else np.ones(q), dtype=float)
    ci = np.asarray(ci if ci is not None else np.column_stack([theta - se, theta + se]))
    return FitResult(
        estimator=estimator,
        theta=theta,
        covariance=np.diag(se**2),
        std_errors=se,
        ci=ci,
        iterations=3,
        converged=True,
        max_abs_gradient=1e-9,
        term_names=tuple(names),
    )


# -- table rendering -------------------------------------------------------------


def test_table_flags_large_ratio_significant():
    table = render_table([_fit("mcmle", [1.440], se=[0.015], names=("sponsor party",))])
    row = table.splitlines()[-1]
    assert "1.440" in row and "0.015 *" in row


def test_table_bootstrap_interval_containing_zero_not_significant():
    fit = _fit("bootstrap_mple", [0.108], ci=[[-0.011, 0.2379]], names=("alternating k-star",))
    table = render_table([fit])
    row = table.splitlines()[-1]
    assert "-0.011" in row and "0.238" in row and "*" not in row


def test_table_zero_estimate_not_significant():
    table = render_table([_fit("mple", [0.0], se=[0.5])])
    assert "*" not in table.splitlines()[-1]


def test_table_mixed_estimators_layout():
    fits = [
        _fit("mcmle", [-5.884, 1.440], se=[0.065, 0.015], names=("edges", "sponsor party")),
        _fit("mple", [-5.869, 1.440], se=[0.015, 0.015], names=("edges", "sponsor party")),
        _fit(
            "bootstrap_mple",
            [-5.879, 1.439],
            ci=[[-6.007, -5.751], [1.411, 1.467]],
            names=("edges", "sponsor party"),
        ),
    ]
    table = render_table(fits)
    head = table.splitlines()[0]
    assert "MCMLE" in head and "Logistic Regression" in head and "Bootstrapped MPLE" in head
    sub = table.splitlines()[1]
    assert "Estimate" in sub and "St. Error" in sub
    assert "Lower Bound" in sub and "Upper Bound" in sub
    edges_row = table.splitlines()[3]
    assert "-6.007" in edges_row and "-5.751 *" in edges_row


def test_table_rejects_mismatched_terms():
    with pytest.raises(ValueError, match="term lists differ"):
        render_table([_fit("mple", [1.0], names=("a",)), _fit("mple", [1.0], names=("b",))])


# -- subcommand plumbing -----------------------------------------------------------


@pytest.fixture()
def workdir(tmp_path):
    g = random_graph(25, 0.2, 11)
    write_edge_csv(tmp_path / "g.csv", g)
    attrs = NodeAttributes(25).add("grp", [i % 2 for i in range(25)])
    write_attr_csv(tmp_path / "a.csv", attrs)
    spec = ModelSpec((Term("edges"), Term("node_match", attr="grp")), np.array([-1.6, 0.4]))
    write_model_config(tmp_path / "m.json", spec)
    return tmp_path


def test_fit_mple_happy_path(workdir):
    out = workdir / "fit"
    rc = parse_and_dispatch(
        ["fit-mple", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
         "--model", str(workdir / "m.json"), "--output-dir", str(out)]
    )
    assert rc == EXIT_OK
    doc = json.loads((out / "fit_mple.json").read_text())
    assert doc["estimator"] == "mple"
    assert doc["manifest"] == "manifest.json"
    assert len(doc["theta"]) == 2
    assert (out / "fit_mple.txt").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "fit-mple"
    assert sorted(manifest["outputs"]) == ["fit_mple.json", "fit_mple.txt"]


def test_missing_attribute_is_config_error(workdir):
    spec = ModelSpec((Term("node_match", attr="party"),))
    write_model_config(workdir / "bad.json", spec)
    rc = parse_and_dispatch(
        ["fit-mple", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
         "--model", str(workdir / "bad.json"), "--output-dir", str(workdir / "x")]
    )
    assert rc == EXIT_INPUT


def test_unknown_flag_is_usage_error(workdir):
    rc = parse_and_dispatch(["fit-mple", "--bogus", "1"])
    assert rc == EXIT_USAGE


def test_missing_file_is_input_error(workdir):
    rc = parse_and_dispatch(
        ["fit-mple", "--graph", str(workdir / "none.csv"), "--model", str(workdir / "m.json")]
    )
    assert rc == EXIT_INPUT


def test_estimation_failure_exit_code(workdir, tmp_path):
    # empty graph separates the edges-only fit
    (tmp_path / "empty.csv").write_text("source,target\n")
    write_model_config(tmp_path / "e.json", ModelSpec((Term("edges"),)))
    rc = parse_and_dispatch(
        ["fit-mple", "--graph", str(tmp_path / "empty.csv"), "--nodes", "8",
         "--model", str(tmp_path / "e.json"), "--output-dir", str(tmp_path / "o")]
    )
    assert rc == EXIT_ESTIMATION


def test_simulate_writes_stats_and_graphs(workdir):
    out = workdir / "sim"
    rc = parse_and_dispatch(
        ["simulate", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
         "--model", str(workdir / "m.json"), "--burn-in", "2000", "--interval", "200",
         "--samples", "12", "--seed", "5", "--retain-graphs", "--output-dir", str(out)]
    )
    assert rc == EXIT_OK
    lines = (out / "sample_stats.csv").read_text().strip().splitlines()
    assert lines[0] == "draw,edges,node_match(grp),density"
    assert len(lines) == 13
    assert (out / "graphs" / "sample_11.csv").exists()


def test_simulate_determinism_byte_identical(workdir):
    args = ["simulate", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
            "--model", str(workdir / "m.json"), "--burn-in", "1500", "--interval", "100",
            "--samples", "10", "--seed", "7"]
    outs = []
    for name in ("s1", "s2"):
        out = workdir / name
        assert parse_and_dispatch(args + ["--output-dir", str(out)]) == EXIT_OK
        outs.append((out / "sample_stats.csv").read_bytes())
    assert outs[0] == outs[1]


def test_bootstrap_cli_outputs(workdir):
    out = workdir / "boot"
    rc = parse_and_dispatch(
        ["bootstrap", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
         "--model", str(workdir / "m.json"), "--replicates", "12", "--burn-in", "1200",
         "--interval", "300", "--seed", "2", "--output-dir", str(out)]
    )
    assert rc == EXIT_OK
    doc = json.loads((out / "bootstrap.json").read_text())
    assert doc["estimator"] == "bootstrap_mple"
    assert doc["replicates_used"] + len(doc["failures"]) == 12
    reps = (out / "replicates.csv").read_text().strip().splitlines()
    assert len(reps) == 1 + doc["replicates_used"]
    assert "Bootstrapped MPLE" in (out / "bootstrap.txt").read_text()


def test_diagnose_consumes_simulate_output(workdir):
    sim = workdir / "sim2"
    parse_and_dispatch(
        ["simulate", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
         "--model", str(workdir / "m.json"), "--burn-in", "2000", "--interval", "300",
         "--samples", "40", "--seed", "8", "--output-dir", str(sim)]
    )
    out = workdir / "diag"
    rc = parse_and_dispatch(
        ["diagnose", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
         "--model", str(workdir / "m.json"), "--stats", str(sim / "sample_stats.csv"),
         "--output-dir", str(out)]
    )
    assert rc == EXIT_OK
    doc = json.loads((out / "gof.json").read_text())
    assert set(doc) >= {"degenerate_empty", "degenerate_full", "terms"}
    assert (out / "trace_edges.csv").exists()
    assert (out / "density_node_match_grp.csv").exists()


def test_experiment_timing_inputs_mode_deterministic(workdir):
    outs = []
    for name in ("t1", "t2"):
        out = workdir / name
        rc = parse_and_dispatch(
            ["experiment", "timing", "--inputs", "10,1,100,500", "--seed", "0",
             "--output-dir", str(out)]
        )
        assert rc == EXIT_OK
        outs.append((out / "timing_rows.csv").read_bytes())
    assert outs[0] == outs[1]
    rows = outs[0].decode().strip().splitlines()
    at500 = [r for r in rows if r.startswith("500,")][0]
    assert at500.split(",")[2] == "0.11"


def test_rerun_reproduces_run(workdir):
    sim = workdir / "r1"
    args = ["simulate", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
            "--model", str(workdir / "m.json"), "--burn-in", "800", "--interval", "80",
            "--samples", "6", "--seed", "3", "--output-dir", str(sim)]
    assert parse_and_dispatch(args) == EXIT_OK
    out2 = workdir / "r2"
    rc = parse_and_dispatch(["rerun", str(sim / "manifest.json"), "--output-dir", str(out2)])
    assert rc == EXIT_OK
    assert (sim / "sample_stats.csv").read_bytes() == (out2 / "sample_stats.csv").read_bytes()


def test_seed_env_override(workdir, monkeypatch):
    out1, out2 = workdir / "e1", workdir / "e2"
    base = ["simulate", "--graph", str(workdir / "g.csv"), "--attrs", str(workdir / "a.csv"),
            "--model", str(workdir / "m.json"), "--burn-in", "500", "--interval", "50",
            "--samples", "5"]
    monkeypatch.setenv("ERGMKIT_SEED", "99")
    assert parse_and_dispatch(base + ["--output-dir", str(out1)]) == EXIT_OK
    monkeypatch.delenv("ERGMKIT_SEED")
    assert parse_and_dispatch(base + ["--seed", "99", "--output-dir", str(out2)]) == EXIT_OK
    assert (out1 / "sample_stats.csv").read_bytes() == (out2 / "sample_stats.csv").read_bytes()
