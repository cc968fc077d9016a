"""File formats and the command-line interface."""

import json
import math
import re

import pytest

from sisrecon import io
from sisrecon.cli import main
from sisrecon.graphs import AdjacencyMatrix
from sisrecon.reduction import build_reduced_trace, plan_reduction
from sisrecon.sis import SISParams, ViralTrace, simulate


def test_dumps_uses_17_significant_digits():
    x = 0.1 + 0.2
    text = io.dumps({"x": x, "k": 3, "inf": -math.inf, "flag": True})
    assert json.loads(text)["x"] == x
    assert "0.30000000000000004" in text
    assert json.loads(text)["inf"] is None
    assert io.dumps(2.0).strip() == "2.0"


def test_trace_round_trip(tmp_path):
    A = AdjacencyMatrix.cycle(4)
    p = SISParams(0.1, 0.05)
    t = simulate(A, p, (1, 0, 1, 0), 200, seed=5)
    path = tmp_path / "t.json"
    io.write_trace(path, t, p)
    t2, p2 = io.read_trace(path)
    assert t2 == t and p2 == p
    d = json.loads(path.read_text())
    assert d["version"] == 1 and d["n"] == 4
    assert d["segments"][0] == {"state": "1010", "repeat": t.segments[0][1]}


def test_trace_rejects_bad_input():
    with pytest.raises(ValueError):
        io.trace_from_dict({"version": 2, "n": 2, "beta_T": 0.1, "delta_T": 0.1, "segments": []})
    with pytest.raises(ValueError):
        io.trace_from_dict({"version": 1, "n": 3, "beta_T": 0.1, "delta_T": 0.1,
                            "segments": [{"state": "10", "repeat": 1}]})


def test_plan_file_round_trip(tmp_path):
    plan = plan_reduction(AdjacencyMatrix.complete(3), SISParams(0.05, 0.1))
    trace = build_reduced_trace(plan)
    path = tmp_path / "plan.json"
    io.write_plan(path, plan, trace)
    d = json.loads(path.read_text())
    assert d["trace_sha256"] == io.trace_digest(trace, plan.params)
    again = io.read_plan(path)
    assert again.to_dict() == plan.to_dict()


@pytest.fixture
def k3_file(tmp_path):
    path = tmp_path / "k3.txt"
    io.write_graph(path, AdjacencyMatrix.complete(3))
    return path


def test_maxcut_command(k3_file, capsys):
    assert main(["maxcut", "--graph", str(k3_file)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == 2 and out["assignments"] == ["001"]


def test_simulate_likelihood_reconstruct(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    io.write_graph(graph, AdjacencyMatrix.path(3))
    trace = tmp_path / "t.json"
    args = ["simulate", "--graph", str(graph), "--beta-t", "0.2", "--delta-t", "0.05",
            "--steps", "500", "--seed", "3", "--out", str(trace)]
    assert main(args) == 0
    first = trace.read_bytes()
    assert main(args) == 0
    assert trace.read_bytes() == first
    assert main(["likelihood", "--trace", str(trace), "--graph", str(graph)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["finite"] and out["log_likelihood"] < 0
    assert main(["reconstruct", "--trace", str(trace)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["evaluated"] == 8 and len(out["argmax"]) >= 1


def test_reduce_then_reconstruct_reduced(tmp_path, k3_file, capsys):
    plan_path, trace_path = tmp_path / "plan.json", tmp_path / "trace.json"
    assert main(["reduce", "--graph", str(k3_file), "--mode", "reduced",
                 "--out-plan", str(plan_path), "--out-trace", str(trace_path)]) == 0
    plan = io.read_plan(plan_path)
    host_path = tmp_path / "host.txt"
    io.write_graph(host_path, plan.host)
    assert main(["reconstruct", "--trace", str(trace_path), "--reduced", "--host", str(host_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert all(s.count("1") in (1, 2) for s in out["argmax"])


def test_reduce_full_is_deterministic(tmp_path, k3_file):
    outs = []
    for k in range(2):
        pp, tp = tmp_path / f"p{k}.json", tmp_path / f"t{k}.json"
        assert main(["reduce", "--graph", str(k3_file), "--mode", "full",
                     "--out-plan", str(pp), "--out-trace", str(tp)]) == 0
        outs.append((pp.read_bytes(), tp.read_bytes()))
    assert outs[0] == outs[1]


def test_verify_command(k3_file, capsys):
    assert main(["verify", "--graph", str(k3_file)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["agree"] and rep["oracle_value"] == rep["reduced_value"] == rep["full_value"] == 2
    assert rep["inequalities"] == {"lemma3_window_ok": True, "kappa_dominance_ok": True}


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n1 4\n")
    assert main(["maxcut", "--graph", str(bad)]) == 2
    assert main(["maxcut", "--graph", str(tmp_path / "missing.txt")]) == 2
    big = tmp_path / "big.txt"
    io.write_graph(big, AdjacencyMatrix.path(9))
    trace = tmp_path / "t.json"
    io.write_trace(trace, ViralTrace.from_states([(1,) + (0,) * 8]), SISParams(0.01, 0.01))
    assert main(["reconstruct", "--trace", str(trace)]) == 3
    infeasible = ["simulate", "--graph", str(big), "--beta-t", "0.5", "--delta-t", "0.5", "--steps", "3"]
    assert main(infeasible) == 2


@pytest.mark.slow
def test_selftest_and_fault_injection(capsys):
    assert main(["selftest"]) == 0
    assert main(["selftest", "--inject-fault", "coefficient"]) == 1
    out = capsys.readouterr().out
    assert re.search(r"quadratic_extraction\s+FAIL", out)
    assert re.search(r"verify_sweep\s+PASS", out)
