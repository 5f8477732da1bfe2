import csv
import json
import subprocess
import sys

import pytest

from logeuler import cli, hydro
from logeuler.errors import RecoveryFailure
from logeuler.report import FAIL, PASS, XFAIL, XPASS, Report, check


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main([*argv, "--out", str(out)])
    report = json.loads((out / "report.json").read_text())
    return code, report, out


def by_name(report):
    return {c["name"]: c for c in report["checks"]}


# --- check-eos ---------------------------------------------------------------------

def test_check_eos_log(tmp_path, capsys):
    code, rep, out = run(tmp_path, "check-eos", "--eos", "stock:logarithmic")
    assert code == 0 and rep["exit_code"] == 0
    checks = by_name(rep)
    assert checks["rho_star"]["metric"] == 1.0
    assert checks["ode_membership"]["status"] == PASS
    assert checks["ode_membership_positive_label"]["status"] == XFAIL
    with open(out / "check_eos.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["rho", "p", "dp", "d2p", "dp_fd_err", "d2p_fd_err", "ode_residual", "subluminal"]
    assert len(rows) == 1001
    assert "0 failed, exit 0" in capsys.readouterr().out


def test_check_eos_gate_failure(tmp_path):
    code, rep, _ = run(tmp_path, "check-eos", "--eos", "stock:logarithmic_weak")
    assert code == 2
    gate = by_name(rep)["coefficient_gate"]
    assert gate["status"] == FAIL
    assert "A > c^2/e" in gate["message"] and "0.367879" in gate["message"]


@pytest.mark.parametrize("name", ["polytropic", "chaplygin", "linear_plus_cubic"])
def test_check_eos_other_families(tmp_path, name):
    code, rep, _ = run(tmp_path, "check-eos", "--eos", f"stock:{name}", "--samples", "200")
    assert code == 0
    expected = XFAIL if name == "linear_plus_cubic" else PASS
    assert by_name(rep)["ode_membership"]["status"] == expected


def test_check_eos_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{family: Logarithmic")
    code, rep, _ = run(tmp_path, "check-eos", "--eos", str(bad))
    assert code == 64 and "ConfigError" in rep["error"]


@pytest.mark.parametrize("argv", [
    ["check-eos"],
    ["check-eos", "--eos", "stock:nope"],
    ["check-eos", "--eos", "stock:logarithmic", "--samples", "0"],
    ["check-eos", "--eos", "stock:logarithmic", "--tol-scale", "-1"],
    ["run"],
    ["verify-symmetrizer", "--eos", "stock:polytropic"],
])
def test_config_errors_exit_64(tmp_path, argv):
    code, _, _ = run(tmp_path, *argv)
    assert code == 64


def test_tol_scale_tightens(tmp_path):
    code, rep, _ = run(tmp_path, "check-eos", "--eos", "stock:logarithmic", "--tol-scale", "1e-9")
    assert code == 1
    failed = [c for c in rep["checks"] if c["status"] == FAIL]
    assert failed and all(c["message"].startswith("violates") for c in failed)


# --- verify-symmetrizer -------------------------------------------------------------

def test_verify_symmetrizer(tmp_path):
    code, rep, out = run(tmp_path, "verify-symmetrizer", "--eos", "stock:logarithmic", "--samples", "100",
                         "--seed", "7")
    assert code == 0, rep
    assert all(c["status"] == PASS for c in rep["checks"])
    with open(out / "verify_symmetrizer.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 102
    edge = [r for r in rows if r["boundary"] == "1"]
    assert edge and all(0 < float(r["lambda3"]) < 1e-10 for r in edge)
    assert all(r["spd"] == "1" for r in rows)


def test_verify_symmetrizer_deterministic(tmp_path):
    argv = ["verify-symmetrizer", "--eos", "stock:logarithmic", "--samples", "40", "--seed", "3"]
    _, _, out = run(tmp_path, *argv)
    first = [(out / f).read_bytes() for f in ("report.json", "verify_symmetrizer.csv")]
    run(tmp_path, *argv)
    second = [(out / f).read_bytes() for f in ("report.json", "verify_symmetrizer.csv")]
    assert first == second
    _, _, out2 = run(tmp_path / "other", *argv[:-1], "4")
    assert (out2 / "verify_symmetrizer.csv").read_bytes() != first[1]


# --- equivalence --------------------------------------------------------------------

def test_equivalence_stock(tmp_path):
    code, rep, out = run(tmp_path, "equivalence", "--scenario", "stock:equivalence")
    assert code == 0
    order = by_name(rep)["transformed_difference_order"]
    assert order["status"] == PASS and order["metric"] >= 1.8
    assert (out / "equivalence.csv").read_text().startswith("cell_index,x,rho_classical")


def test_equivalence_zero(tmp_path):
    code, rep, _ = run(tmp_path, "equivalence", "--scenario", "stock:equivalence_zero")
    assert code == 0
    assert by_name(rep)["transformed_difference_zero"]["metric"] == 0.0


def test_equivalence_nonmember_expected_fail(tmp_path):
    code, rep, _ = run(tmp_path, "equivalence", "--scenario", "stock:equivalence_nonmember")
    assert code == 0
    order = by_name(rep)["transformed_difference_order"]
    assert order["status"] == XFAIL and order["metric"] < 1.8


# --- run ------------------------------------------------------------------------------

def test_run_conservation(tmp_path):
    code, rep, out = run(tmp_path, "run", "--scenario", "stock:conservation")
    assert code == 0
    checks = by_name(rep)
    assert checks["conservation_D"]["metric"] <= 1e-12
    assert checks["conservation_S"]["metric"] <= 1e-12
    assert (out / "snapshots.csv").read_text().startswith("t,x,rho,v,p,D,S\n")


def test_run_smooth_wave(tmp_path):
    code, rep, out = run(tmp_path, "run", "--scenario", "stock:smooth_wave")
    assert code == 0
    assert by_name(rep)["smooth_self_convergence"]["metric"] >= 1.8
    assert (out / "convergence.csv").exists()


def test_run_inadmissible_initial_data(tmp_path):
    sc = {
        "eos": {"family": "Logarithmic", "A": 1.0}, "cells": 32,
        "init": {"type": "riemann", "rho_left": 5.0, "rho_right": 0.5},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(sc))
    code, rep, _ = run(tmp_path, "run", "--scenario", str(path))
    assert code == 2 and "AssumptionViolation" in rep["error"]


def test_run_recovery_failure_exit_3(tmp_path, monkeypatch):
    def broken(scenario):
        raise RecoveryFailure("no admissible density", index=3)

    monkeypatch.setattr(hydro, "run", broken)
    code, rep, _ = run(tmp_path, "run", "--scenario", "stock:conservation")
    assert code == 3 and "RecoveryFailure" in rep["error"]


def test_run_unknown_study(tmp_path):
    sc = {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 16, "t_end": 0.01, "study": {"kind": "magic"}}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sc))
    code, _, _ = run(tmp_path, "run", "--scenario", str(path))
    assert code == 64


# --- report plumbing --------------------------------------------------------------------

def test_exit_code_precedence():
    rep = Report("x", 0)
    rep.add(check("a", True, 0.0, 1.0, "cond"))
    assert rep.exit_code == 0
    rep.add(check("b", True, 0.0, 1.0, "cond", expect_fail=True))
    assert rep.checks[-1].status == XPASS and rep.exit_code == 1
    rep.add(check("c", False, 2.0, 1.0, "cond", kind="recovery"))
    assert rep.exit_code == 3
    rep.add(check("d", False, 2.0, 1.0, "cond", kind="admissibility"))
    assert rep.exit_code == 2


def test_xfail_does_not_fail():
    rep = Report("x", 0)
    rep.add(check("a", False, 2.0, 1.0, "cond", expect_fail=True))
    assert rep.exit_code == 0 and rep.checks[0].status == XFAIL


def test_non_finite_metrics_serialize():
    rep = Report("x", 0)
    rep.add(check("a", True, float("inf"), 1.0, "cond"))
    assert json.loads(rep.to_json())["checks"][0]["metric"] == "inf"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "logeuler.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for verb in ("check-eos", "verify-symmetrizer", "equivalence", "run"):
        assert verb in proc.stdout
