import io
import json
import subprocess
import sys

import pytest

from qframe.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines()]


@pytest.fixture
def seq_file(tmp_path):
    path = tmp_path / "ones.json"
    path.write_text(json.dumps({"kind": "fseq", "pattern": "1"}))
    return str(path)


def test_eval_value_human():
    code, out, _ = call("eval", "value", "1001-0111")
    assert code == 0
    assert "value: -9.4375" in out and "seed: 0" in out


@pytest.mark.parametrize("argv, key, want", [
    (("eval", "add", "1+1", "1+"), "result", "10+1"),
    (("eval", "mul", "1-1", "10+"), "result", "11-"),
    (("eval", "div", "1+", "11+", "--ell", "4"), "result", "0+0101"),
    (("eval", "le", "1-", "0+"), "holds", True),
    (("eval", "eq", "10+0", "010+"), "holds", True),
    (("eval", "canon", "00100+100"), "canonical", "100+1"),
    (("eval", "accuracy", "3"), "state", "0+001"),
])
def test_eval_json(argv, key, want):
    code, out, _ = call("--json", *argv)
    assert code == 0
    assert records(out)[0][key] == want


def test_flags_after_subcommand():
    code, out, _ = call("eval", "value", "1+", "--format", "json", "--seed", "5")
    assert code == 0 and records(out)[0]["seed"] == 5


def test_csv_output():
    code, out, _ = call("--format", "csv", "eval", "add", "1+", "1+")
    rows = out.splitlines()
    assert code == 0 and rows[0].split(",") == ["op", "result", "seed", "value", "x", "y"]
    assert rows[1].startswith("add,10+,0,")


def test_domain_errors_exit_one():
    assert call("eval", "div", "1+", "0+")[0] == 1
    code, _, err = call("eval", "value", "1+1+")
    assert code == 1 and "ParseError" in err


def test_usage_error_suggests_flag(capsys):
    code, _, _ = call("eval", "value", "1+", "--jsn")
    assert code == 2
    assert "did you mean --json" in capsys.readouterr().err
    assert call("nonsense")[0] == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "q.cfg"
    cfg.write_text("# defaults\nformat = json\nseed = 9\nlmax = 3\n")
    code, out, _ = call("--config", str(cfg), "eval", "value", "1+")
    assert code == 0 and records(out)[0]["seed"] == 9
    code, out, _ = call("--config", str(cfg), "--seed", "4", "eval", "value", "1+")
    assert records(out)[0]["seed"] == 4
    (tmp_path / "bad.cfg").write_text("format json\n")
    assert call("--config", str(tmp_path / "bad.cfg"), "eval", "value", "1+")[0] == 2


def test_cauchy_check_reports_witnesses(seq_file):
    code, out, _ = call("--json", "cauchy", "check", "--seq", seq_file, "--lmax", "5", "--budget", "8")
    rep = records(out)[0]
    assert code == 0 and rep["verdict"] == "cauchy"
    assert [w for _, w in sorted(rep["witnesses"].items(), key=lambda kv: int(kv[0]))] == [0, 1, 2, 3, 4]


def test_cauchy_prob_with_gauge(seq_file):
    code, out, _ = call("--json", "cauchy", "prob", "--seq", seq_file, "--lmax", "1", "--hmax", "3",
                        "--gauge", "hadamard")
    assert code == 0 and 0 <= records(out)[0]["estimate"] <= 1


def test_gauge_apply_and_overlap():
    code, out, _ = call("--json", "gauge", "apply", "--gauge", "hadamard", "--state", "1+")
    rep = records(out)[0]
    assert code == 0 and rep["norm"] == pytest.approx(1)
    assert rep["support"] == len(rep["terms"]) > 1
    code, out, _ = call("--json", "gauge", "overlap", "--gauge", "identity", "--state", "1-1")
    assert records(out)[0]["abs"] == pytest.approx(1)


def test_random_gauge_is_seeded_and_repeatable():
    argv = ("--json", "--seed", "17", "gauge", "apply", "--gauge", "random", "--state", "10+1")
    first, second = call(*argv)[1], call(*argv)[1]
    assert first == second and records(first)[0]["seed"] == 17
    assert call("--json", "--seed", "18", *argv[3:])[1] != first


def test_dfs_commands():
    code, out, _ = call("--json", "dfs", "decode", "--bits", "1011")
    assert code == 0 and records(out)[0]["decoded"] == "1011"
    code, out, _ = call("--json", "--seed", "3", "dfs", "fuzz", "--bits", "0110", "--trials", "20")
    rep = records(out)[0]
    assert rep["mode"] == "global" and rep["max_deviation"] <= 1e-12 and rep["seed"] == 3
    code, out, _ = call("--json", "dfs", "fuzz", "--bits", "01", "--trials", "20", "--local-unpaired")
    assert records(out)[0]["max_deviation"] > 0.1


def test_frames_workflow(tmp_path):
    graph = str(tmp_path / "f.json")
    assert call("frames", "new", "--topology", "cyclic:2", "--graph", graph)[0] == 0
    code, out, _ = call("--json", "--seed", "1", "frames", "spawn", "--parent", "F", "--gauge", "random",
                        "--graph", graph)
    child = records(out)[0]["frame"]
    assert code == 0 and child.startswith("F.")
    # a repeated spawn with the same seed finds the same frame
    assert records(call("--json", "--seed", "1", "frames", "spawn", "--parent", "F", "--gauge", "random",
                        "--graph", graph)[1])[0]["frame"] == child
    code, out, _ = call("--json", "frames", "view", "--observer", "F", "--owner", child, "--state", "1+",
                        "--graph", graph)
    assert code == 0 and records(out)[0]["terms"]
    assert call("frames", "cycle", "--graph", graph)[0] == 1
    call("frames", "spawn", "--parent", child, "--gauge", "hadamard", "--graph", graph)
    code, out, _ = call("--json", "frames", "cycle", "--graph", graph)
    assert code == 0 and records(out)[0]["is_identity"] is False
    # the loop is closed now, so the child can no longer be viewed from the seed
    assert call("frames", "view", "--observer", "F", "--owner", child, "--state", "1+", "--graph", graph)[0] == 1
    code, out, _ = call("frames", "export", "--dot", "--graph", graph)
    assert out.startswith("digraph") and "style=dashed" in out


def test_finite_overflow_is_domain_error(tmp_path):
    graph = str(tmp_path / "f.json")
    call("frames", "new", "--topology", "finite", "--k", "1", "--graph", graph)
    child = records(call("--json", "frames", "spawn", "--parent", "F", "--gauge", "hadamard",
                         "--graph", graph)[1])[0]["frame"]
    code, _, err = call("frames", "spawn", "--parent", child, "--gauge", "identity", "--graph", graph)
    assert code == 1 and "TopologyError" in err


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "qframe.cli", "--json", "eval", "value", "11-"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "-3"
