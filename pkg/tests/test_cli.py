import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zkspeed.cli import main
from zkspeed.perf.dse import read_csv


def run(argv, capsys):
    try:
        rc = main(argv)
    except SystemExit as e:
        rc = e.code
    out, err = capsys.readouterr()
    return rc, out, err


def test_prove_then_self_verify(tmp_path, capsys):
    rc, out, _ = run(["prove", "--mu", "4", "--seed", "1", "--out", str(tmp_path)], capsys)
    assert rc == 0 and json.loads(out)["cmd"] == "prove"
    rc, out, _ = run(["self-verify", "--workload", str(tmp_path / "workload.json"),
                      "--bundle", str(tmp_path / "bundle.bin")], capsys)
    assert rc == 0 and json.loads(out)["status"] == "pass"


def test_artifacts_are_byte_identical(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["prove", "--mu", "3", "--seed", "9", "--out", str(tmp_path / d)], capsys)[0] == 0
        assert run(["dse", "--mu", "12", "--bandwidth", "512", "--pareto-only",
                    "--out", str(tmp_path / d / "dse.csv")], capsys)[0] == 0
    for f in ("workload.json", "bundle.bin", "dse.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_tampered_bundle_fails_with_json(tmp_path, capsys):
    run(["prove", "--mu", "3", "--out", str(tmp_path)], capsys)
    from zkspeed.prover import dump_bundle, load_bundle
    b = load_bundle((tmp_path / "bundle.bin").read_bytes())
    b.opening_value = b.opening_value + 1
    (tmp_path / "bad.bin").write_bytes(dump_bundle(b))
    rc, _, err = run(["self-verify", "--workload", str(tmp_path / "workload.json"),
                      "--bundle", str(tmp_path / "bad.bin")], capsys)
    assert rc == 1
    doc = json.loads(err)
    assert doc["error"] == "self-verification failed" and "opening" in doc["failed"]


@pytest.mark.parametrize("argv", [
    ["prove", "--mu", "25"],
    ["prove", "--mu", "1"],
    ["prove"],
    ["prove", "--mu", "4", "--sparsity", "0.5,0.6,0.1"],
    ["prove", "--mu", "4", "--sparsity", "a,b"],
    ["dump-costs", "--design", "1,2,3"],
    ["dump-costs", "--design", "msm_pes=3"],
    ["dse", "--config", "/nonexistent.toml"],
    ["census", "--threads", "0"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    rc, _, err = run(argv, capsys)
    assert rc == 2
    assert "usage" in err


@settings(max_examples=25)
@given(st.tuples(*[st.floats(0, 1, allow_nan=False)] * 3))
def test_sparsity_flag_validation(fr):
    argv = ["gen-workload", "--mu", "3", "--sparsity", ",".join(map(repr, fr)), "--out", "/tmp/zk-hyp"]
    try:
        rc = main(argv)
    except SystemExit as e:
        rc = e.code
    assert rc == (0 if abs(sum(fr) - 1) <= 1e-9 else 2)


def test_model_commands(tmp_path, capsys):
    rc, out, _ = run(["sweep-batch", "--out", str(tmp_path / "b.csv")], capsys)
    assert rc == 0 and json.loads(out)["optimum"] == 64
    schema, rows = read_csv(tmp_path / "b.csv")
    assert schema.startswith("zkspeed-sweep-batch/")
    best = min(rows, key=lambda r: float(r["imbalance"]))
    assert best["n"] == "64"
    rc, out, _ = run(["dump-costs", "--out", str(tmp_path / "c.json")], capsys)
    assert rc == 0 and json.loads(out)["area_mm2"] == 366.46
    rc, out, _ = run(["census", "--mu", "20"], capsys)
    assert rc == 0 and json.loads(out)["kernels"] == 13
    rc, out, _ = run(["census", "--instrumented", "--mu", "4"], capsys)
    assert rc == 0 and json.loads(out)["mode"] == "instrumented"
    rc, out, _ = run(["sweep-bandwidth", "--out", str(tmp_path / "s.csv")], capsys)
    assert rc == 0 and read_csv(tmp_path / "s.csv")[0].startswith("zkspeed-sweep-bandwidth/")


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "zkspeed", "prove", "--mu", "99"],
                       capture_output=True, text=True)
    assert p.returncode == 2
