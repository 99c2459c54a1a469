import csv
import json
import subprocess
import sys

import pytest

from genburgers.cli import RunConfig, build_data, main, parse_config
from genburgers.errors import ConfigurationError, DomainError
from genburgers.initial_data import Step

SMALL = {
    "problem": {"alpha": 1.0, "T": 0.02, "data": {"type": "step", "u_minus": -1, "u_plus": 1}},
    # sqrt(t_min) must exceed about two cells or the front is under-resolved
    "solver": {"nx": 251, "time_panels": 48, "t_min_report": 2e-3},
    "fd": {"nx": 251},
}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_defaults():
    cfg = parse_config({})
    assert isinstance(cfg, RunConfig) and cfg.solver.nx == 2001
    assert isinstance(cfg.initial_data, Step)


@pytest.mark.parametrize("doc", [
    {"bogus": 1},
    {"problem": {"alpha": -1}},
    {"problem": {"T": 0}},
    {"problem": {"speed": 1}},
    {"solver": {"nx": 10}},
    {"solver": {"grid": 3}},
    {"checks": ["energy"]},
    {"problem": {"data": {"type": "step", "u_minus": 1}}},
    {"problem": {"data": {"type": "sine"}}},
])
def test_parse_config_rejects(doc):
    with pytest.raises((ConfigurationError, DomainError)):
        parse_config(doc)


def test_build_data_types():
    assert build_data({"type": "constant", "value": 0.5}).sup_norm == 0.5
    assert build_data({"type": "piecewise_constant", "breakpoints": [0, 1], "values": [0, 1, 0]}).upper == 1
    assert build_data({"type": "tanh", "u_left": -1, "u_right": 1, "width": 0.2}).left_limit == -1


def test_malformed_json_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"problem": {"alpha": 1.0,}}')
    out = tmp_path / "out"
    assert main(["solve", "--config", str(p), "--out", str(out)]) == 2
    assert "line 1" in capsys.readouterr().err
    assert not out.exists()


def test_missing_config_exit_2(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "o")]) == 2


def test_negative_seed_exit_2(tmp_path):
    assert main(["solve", "--seed", "-1", "--out", str(tmp_path / "o")]) == 2


def test_solve_artifacts(tmp_path):
    out = tmp_path / "out"
    assert main(["solve", "--config", _write(tmp_path, SMALL), "--out", str(out)]) == 0
    meta = json.loads((out / "metadata.json").read_text())
    assert len(meta["patches"]) == 2
    assert meta["patches"][0]["iterations"] <= 40
    assert (out / "profiles.svg").read_text().startswith("<?xml")
    rows = _rows(out / "solution.csv")
    assert {r["source"] for r in rows} == {"mild"}
    assert max(abs(float(r["u"])) for r in rows) <= 1.0 + 1e-4


def test_solve_is_deterministic(tmp_path):
    cfg = _write(tmp_path, SMALL)
    for name in ("a", "b"):
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / name)]) == 0
    for f in ("solution.csv", "metadata.json", "profiles.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_solver_failure_writes_error_json(tmp_path):
    doc = {**SMALL, "solver": {**SMALL["solver"], "max_iterations": 2}}
    out = tmp_path / "out"
    assert main(["solve", "--config", _write(tmp_path, doc), "--out", str(out)]) == 1
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "ConvergenceError" and err["patch_index"] == 0
    assert not (out / "solution.csv").exists()


def test_verify_kernel_default_passes(tmp_path):
    out = tmp_path / "out"
    assert main(["verify-kernel", "--out", str(out)]) == 0
    rows = _rows(out / "kernel_identities.csv")
    assert len(rows) == 12 and all(r["passed"] == "true" for r in rows)


def test_verify_kernel_low_order_fails(tmp_path):
    doc = {"kernel": {"quad": {"hermite_order": 4}}}
    out = tmp_path / "out"
    assert main(["verify-kernel", "--config", _write(tmp_path, doc), "--out", str(out)]) == 1
    rows = _rows(out / "kernel_identities.csv")
    failed = {r["identity"] for r in rows if r["passed"] == "false"}
    assert failed == {"integral_absGs"}


def test_verify_kernel_single_identity(tmp_path):
    out = tmp_path / "out"
    assert main(["verify-kernel", "--check", "integral_G", "--out", str(out)]) == 0
    assert {r["identity"] for r in _rows(out / "kernel_identities.csv")} == {"integral_G"}
    assert main(["verify-kernel", "--check", "nope", "--out", str(out)]) == 2


def test_invariants_subset(tmp_path):
    out = tmp_path / "out"
    args = ["invariants", "--config", _write(tmp_path, SMALL), "--out", str(out),
            "--check", "max_principle", "--check", "monotonicity"]
    assert main(args) == 0
    doc = json.loads((out / "invariants.json").read_text())
    assert [r["name"] for r in doc["reports"]] == ["max_principle", "monotonicity"]
    assert {r["check"] for r in _rows(out / "invariants.csv")} == {"max_principle", "monotonicity"}


def test_invariants_failure_exit_1(tmp_path):
    out = tmp_path / "out"
    # the O(t) small-time rate does not hold for jump data
    args = ["invariants", "--config", _write(tmp_path, SMALL), "--out", str(out), "--check", "small_time"]
    assert main(args) == 1
    assert json.loads((out / "invariants.json").read_text())["reports"][0]["status"] == "fail"


def test_compare_rows(tmp_path):
    out = tmp_path / "out"
    doc = {**SMALL, "report_times": [0.005, 0.01],
           "solver": {**SMALL["solver"], "nx": 501}, "fd": {"nx": 501},
           "compare": {"tolerance": 2e-3}}
    assert main(["compare", "--config", _write(tmp_path, doc), "--out", str(out)]) == 0
    checks = {r["check"]: r for r in _rows(out / "compare_checks.csv")}
    assert set(checks) == {"tolerance", "ordering"}
    assert all(r["passed"] == "true" for r in checks.values())
    rows = _rows(out / "compare.csv")
    assert {r["fd_run"] for r in rows} == {"fd", "fd_coarse"}
    assert sorted({float(r["t"]) for r in rows}) == [0.005, 0.01, 0.02]
    assert (out / "fd_solution.csv").exists()


def test_sweep_rows(tmp_path):
    out = tmp_path / "out"
    args = ["sweep", "--config", _write(tmp_path, SMALL), "--out", str(out), "--check", "max_principle"]
    assert main(args) == 0
    rows = _rows(out / "sweep.csv")
    assert [r["alpha"] for r in rows] == ["0.5", "1.0", "2.0"]
    assert all(r["status"] == "pass" for r in rows)


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "genburgers", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("solve", "verify-kernel", "invariants", "compare", "sweep"):
        assert name in res.stdout
