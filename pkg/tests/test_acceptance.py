"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s``.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from logeuler import classical, hydro, symmetrizer
from logeuler.cli import _load_eos, _load_json, boundary_states, make_rng, sample_states
from logeuler.eos import EosSpec, dp_drho, lemma1_bounds, ode_residual, pressure
from logeuler.errors import AssumptionViolation
from logeuler.tolerances import TOLERANCES, THRESHOLDS

N = 1000


def verdict(capsys, number, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({elapsed:.2f} s, limit {limit:g} s)")
    assert ok, detail


@pytest.fixture(scope="module")
def log_eos():
    return EosSpec.logarithmic(1.0)


@pytest.fixture(scope="module")
def states(log_eos):
    window = lemma1_bounds(log_eos)
    return window, sample_states(log_eos, window, N, make_rng(0))


def test_criterion_1_family_certification(capsys):
    t0 = time.perf_counter()
    rng = make_rng(1)
    rho = np.exp(rng.uniform(math.log(1e-2), math.log(1e3), N))
    members = {
        "polytropic A=1": EosSpec.polytropic(1.0),
        "polytropic A=2.5": EosSpec.polytropic(2.5),
        "chaplygin A=-2": EosSpec.chaplygin(-2.0),
        "chaplygin A=-1.5": EosSpec.chaplygin(-1.5),
        "logarithmic": EosSpec.logarithmic(1.0),
    }
    worst = {k: float(np.max(np.abs(ode_residual(e, rho)) / rho)) for k, e in members.items()}
    positive_label = float(np.max(np.abs(ode_residual(members["logarithmic"], rho, a_eff=1.0)) / rho))
    elapsed = time.perf_counter() - t0
    tol = TOLERANCES["ode_residual"]
    ok = all(v <= tol for v in worst.values()) and positive_label > tol
    detail = (f"max scaled residual {max(worst.values()):.2e} <= {tol:g}; "
              f"logarithmic with A_eff=+1 fails with {positive_label:.2e}")
    verdict(capsys, 1, ok, detail, elapsed, 1.0)


def test_criterion_2_density_floor(capsys, log_eos):
    t0 = time.perf_counter()
    rho = np.exp(make_rng(2).uniform(0.0, math.log(1e3), N))
    rho[0], rho[-1] = log_eos.rho_star, 1e3
    enthalpy = rho * log_eos.c**2 + pressure(log_eos, rho)
    subluminal = dp_drho(log_eos, rho) <= log_eos.c**2
    rejected = []
    for A in (1 / math.e, 0.3, 0.1):
        try:
            lemma1_bounds(EosSpec.logarithmic(A))
        except AssumptionViolation:
            rejected.append(A)
    elapsed = time.perf_counter() - t0
    ok = log_eos.rho_star == 1.0 and np.all(enthalpy > 0) and np.all(subluminal) and len(rejected) == 3
    detail = (f"rho*={log_eos.rho_star!r}, min(rho c^2 + p)={enthalpy.min():.3g} > 0, "
              f"gate rejected A in {[round(a, 4) for a in rejected]}")
    verdict(capsys, 2, ok, detail, elapsed, 1.0)


def test_criterion_3_symmetrizer_spd(capsys, log_eos, states):
    window, sample = states
    vmax2 = 0.99 * (1 - window.velocity_margin) * log_eos.c**2
    t0 = time.perf_counter()
    worst, chol, lam3 = 0.0, True, math.inf
    for s in sample:
        spd = symmetrizer.check_A0_spd(log_eos, s, window=window)
        chol &= spd.cholesky_ok and spd.spd
        worst = max(worst, spd.eig_rel_err)
        lam3 = min(lam3, spd.lambda3)
    elapsed = time.perf_counter() - t0
    at_edge = sum(math.isclose(s.speed2, vmax2, rel_tol=1e-12) for s in sample)
    tol = TOLERANCES["eig_rel"]
    ok = len(sample) >= N and at_edge >= 1 and chol and worst <= tol and lam3 > 0
    detail = (f"{len(sample)} states ({at_edge} at |v|^2=0.99(1-delta)c^2), Cholesky ok={chol}, "
              f"eigenvalue error {worst:.2e} <= {tol:g}")
    verdict(capsys, 3, ok, detail, elapsed, 5.0)


def test_criterion_4_jacobian(capsys, log_eos, states):
    window, sample = states
    t0 = time.perf_counter()
    fd, det_err, det_min = 0.0, 0.0, math.inf
    for s in sample:
        J = symmetrizer.jacobian_w(log_eos, s, window=window)
        fd = max(fd, float(np.max(np.abs(J - symmetrizer.jacobian_w_fd(log_eos, s))) / np.max(np.abs(J))))
        det = symmetrizer.jacobian_det(log_eos, s, window=window)
        det_err = max(det_err, abs(np.linalg.det(J) - det) / abs(det))
        det_min = min(det_min, det)
    for s in boundary_states(log_eos, window):
        det_min = min(det_min, symmetrizer.jacobian_det(log_eos, s, window=window))
    elapsed = time.perf_counter() - t0
    ok = fd <= TOLERANCES["jacobian_fd"] and det_err <= TOLERANCES["det_rel"] and det_min > 0
    detail = (f"finite-difference error {fd:.2e} <= 1e-6, determinant error {det_err:.2e} <= 1e-10, "
              f"min det {det_min:.3g} > 0")
    verdict(capsys, 4, ok, detail, elapsed, 5.0)


def test_criterion_5_bijection(capsys, log_eos, states):
    window, sample = states
    t0 = time.perf_counter()
    worst = 0.0
    for s in sample:
        back = symmetrizer.from_sym(log_eos, symmetrizer.to_sym(log_eos, s, window=window), window=window)
        worst = max(worst, abs(back.rho - s.rho) / s.rho, float(np.max(np.abs(back.v - s.v))) / log_eos.c)
    elapsed = time.perf_counter() - t0
    tol = TOLERANCES["roundtrip"]
    verdict(capsys, 5, worst <= tol, f"round-trip error {worst:.2e} <= {tol:g} over {len(sample)} states",
            elapsed, 5.0)


def test_criterion_6_equivalence(capsys):
    t0 = time.perf_counter()
    member = classical.EquivalenceScenario.from_dict(_load_json("stock:equivalence"))
    other = classical.EquivalenceScenario.from_dict(_load_json("stock:equivalence_nonmember"))
    res = classical.equivalence_study(member)
    bad = classical.equivalence_study(other)
    elapsed = time.perf_counter() - t0
    thr = THRESHOLDS["equivalence_order"]
    falsified = not (bad.min_order >= thr)
    ok = res.cells == [64, 128, 256] and res.min_order >= thr and falsified
    detail = (f"cells {res.cells}, order {res.min_order:.2f} >= {thr}; "
              f"non-member orders {[round(o, 2) for o in bad.orders]} fail as expected")
    verdict(capsys, 6, ok, detail, elapsed, 60.0)


def test_criterion_7_solver(capsys):
    t0 = time.perf_counter()
    cons = hydro.HydroScenario.from_dict(_load_json("stock:conservation"))
    r = hydro.run(cons)
    drift = max(r.drift_D, r.drift_S) / max(1.0, r.steps / 1000)
    smooth = hydro.HydroScenario.from_dict(_load_json("stock:smooth_wave"))
    _, s_orders = hydro.smooth_convergence(smooth, (128, 256, 512))
    riemann = hydro.HydroScenario.from_dict(_load_json("stock:riemann"))
    errors, r_order = hydro.reference_convergence(riemann, (512, 1024, 2048), 8192)
    # admissibility at every output of the stock runs
    admissible = True
    rs = riemann.eos.rho_star
    for sc in (smooth, replace(riemann, outputs=10)):
        for snap in hydro.run(sc).snapshots:
            admissible &= bool(np.all(snap.rho >= rs) and np.all(np.abs(snap.v) < sc.eos.c))
    elapsed = time.perf_counter() - t0
    ok = (drift <= TOLERANCES["conservation"] and min(s_orders) >= THRESHOLDS["smooth_order"]
          and r_order >= THRESHOLDS["reference_order"] and admissible)
    detail = (f"drift {drift:.1e} per 1000 steps, smooth order {min(s_orders):.2f}, "
              f"Riemann L1 order {r_order:.2f}, admissible={admissible}")
    verdict(capsys, 7, ok, detail, elapsed, 120.0)


def test_criterion_8_variant(capsys, log_eos):
    t0 = time.perf_counter()
    first = symmetrizer.select_ak_variant(log_eos)
    second = symmetrizer.select_ak_variant(log_eos)
    elapsed = time.perf_counter() - t0
    winners = [(r.diagonal, r.coupling) for r in first.results if r.annihilates]
    ok = first.unique and len(winners) == 1 and first.selected == second.selected
    detail = f"annihilating variant {first.selected}, {len(first.results)} candidates, deterministic"
    verdict(capsys, 8, ok, detail, elapsed, math.inf)
