import json
import os

import pytest

from rigsim.cli import main

MODEL = {"model": "active", "n1": 500, "n2": 500, "P": {"kind": "constant", "value": 3}}


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh)
    return str(path)


@pytest.fixture
def model_cfg(tmp_path):
    return write_json(tmp_path / "model.json", MODEL)


@pytest.fixture
def plan_cfg(tmp_path):
    return write_json(
        tmp_path / "plan.json",
        {
            "model": MODEL,
            "ladder": [200, 400],
            "statistics": ["alpha", "pi:2", "ball:1"],
            "replications": 2,
            "seed": 5,
            "mc_reference_samples": 2000,
        },
    )


def test_generate_and_stats_roundtrip(tmp_path, model_cfg):
    out = tmp_path / "gen"
    assert main(["generate", "--config", model_cfg, "--seed", "3", "--out", str(out)]) == 0
    graph_file = out / "graph.txt"
    assert graph_file.exists() and (out / "bipartite.txt").exists()
    out2 = tmp_path / "st"
    rc = main(
        ["stats", "--graph", str(graph_file), "--stats", "alpha,assort,moment:2,pi:3,emb:K3", "--out", str(out2)]
    )
    assert rc == 0
    rows = json.load(open(out2 / "stats.json"))
    names = {r["name"] for r in rows}
    assert {"alpha", "assort", "moment(2)", "pi(3)", "emb(K3)"} <= names


def test_limits_report(tmp_path):
    cfg = write_json(tmp_path / "lim.json", {"model": MODEL})
    out = tmp_path / "lim"
    assert main(["limits", "--config", cfg, "--k-values", "2", "--out", str(out)]) == 0
    rows = json.load(open(out / "limits.json"))
    vals = {r["quantity"]: r for r in rows}
    assert vals["alpha"]["value"] == pytest.approx(1 / 3)
    assert vals["dstar_moment(1)"]["value"] == pytest.approx(9.0)
    assert vals["alpha_k(2)"]["value"] == pytest.approx(1 / 3)


def test_limits_direct_laws(tmp_path):
    cfg = write_json(
        tmp_path / "lim2.json",
        {"D1": {"kind": "pmf", "pmf": {"1": 0.5, "2": 0.5}}, "D2": {"kind": "constant", "value": 2}},
    )
    out = tmp_path / "lim2"
    assert main(["limits", "--config", cfg, "--out", str(out)]) == 0
    rows = json.load(open(out / "limits.json"))
    vals = {r["quantity"]: r for r in rows}
    assert vals["assort"]["value"] == pytest.approx(0.0, abs=1e-12)


def test_limits_undefined_conditionals_reported_not_fatal(tmp_path):
    # d* is supported on {1, 3}: alpha_k(2)/r_k(2) are undefined but the rest
    # of the report must still be produced
    cfg = write_json(
        tmp_path / "lim3.json",
        {"D1": {"kind": "pmf", "pmf": {"1": 0.5, "3": 0.5}}, "D2": {"kind": "constant", "value": 2}},
    )
    out = tmp_path / "lim3"
    assert main(["limits", "--config", cfg, "--k-values", "2", "--out", str(out)]) == 0
    rows = json.load(open(out / "limits.json"))
    vals = {r["quantity"]: r for r in rows}
    assert "error" in vals["alpha_k(2)"] and "error" in vals["r_k(2)"]
    assert vals["pi(2)"]["value"] == pytest.approx(0.0, abs=1e-15)
    assert vals["dstar_moment(1)"]["value"] == pytest.approx(2.0)


def test_balls_mc_and_empirical(tmp_path, model_cfg):
    cfg = write_json(tmp_path / "spec.json", {"model": MODEL})
    out = tmp_path / "balls"
    assert main(["balls", "--config", cfg, "--r", "1", "--samples", "3000", "--seed", "2", "--out", str(out)]) == 0
    rows = json.load(open(out / "balls_r1.json"))
    assert abs(sum(r["probability"] for r in rows) - 1) < 1e-9
    gen_out = tmp_path / "g2"
    main(["generate", "--config", model_cfg, "--seed", "4", "--out", str(gen_out)])
    out2 = tmp_path / "balls2"
    assert main(["balls", "--config", cfg, "--graph", str(gen_out / "graph.txt"), "--r", "1", "--out", str(out2)]) == 0


def test_converge_deterministic_across_threads_and_runs(tmp_path, plan_cfg):
    outs = []
    for name, threads in (("a", "1"), ("b", "8"), ("c", "1")):
        out = tmp_path / name
        rc = main(
            ["converge", "--config", plan_cfg, "--seed", "5", "--threads", threads, "--out", str(out), "--format", "csv"]
        )
        assert rc == 0
        outs.append((out / "converge.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_theorem21_cli(tmp_path, plan_cfg):
    out = tmp_path / "t21"
    rc = main(["theorem21", "--config", plan_cfg, "--pattern", "K3", "--out", str(out)])
    assert rc == 0
    text = (out / "theorem21_K3.csv").read_text()
    assert text.splitlines()[0] == "n1,statistic,empirical,emp_stderr,limit,limit_stderr,gap,tv"


def test_exit_codes(tmp_path):
    assert main(["limits", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 1
    bad = write_json(tmp_path / "bad.json", {"model": "nope"})
    assert main(["generate", "--config", bad, "--out", str(tmp_path)]) == 1
    # runtime abort (node cap inside a converge run on a supercritical plan is
    # hard to trigger cheaply; validation errors cover exit code 1, and the
    # abort path is exercised by unexpected exceptions)
    plan = write_json(
        tmp_path / "plan_budget.json",
        {
            "model": MODEL,
            "ladder": [200],
            "statistics": ["alpha"],
            "edge_budget": 10,
        },
    )
    assert main(["converge", "--config", plan, "--out", str(tmp_path / "x")]) == 1
