"""``logeuler`` command line: verification suites and the 1D solver.

Every verb writes ``report.json`` plus its CSV artifacts into ``--out`` and
prints a human summary.  Sampling uses numpy's PCG64 seeded through
``SeedSequence(seed)`` so a fixed seed reproduces reports byte for byte.

Exit codes: 0 success, 1 failed property check, 2 admissibility or
assumption failure, 3 primitive recovery failure, 64 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import classical, hydro, symmetrizer
from .eos import (
    EosSpec,
    Family,
    d2p_drho2,
    dp_drho,
    lemma1_bounds,
    ode_residual,
    pressure,
    subluminal_check,
)
from .errors import (
    AssumptionViolation,
    ConfigError,
    InadmissibleTarget,
    LogEulerError,
    RecoveryFailure,
    SuperluminalState,
)
from .report import (
    EXIT_ADMISSIBILITY,
    EXIT_CHECK,
    EXIT_CONFIG,
    EXIT_RECOVERY,
    Report,
    check,
)
from .tolerances import DEFAULT_SAMPLES, DEFAULT_SEED, THRESHOLDS, scaled

# condition anchors quoted in failure messages
ANCHOR_ODE = "the sound-speed ODE A p'/p'' = rho"
ANCHOR_GATE = "the coefficient gate A > c^2/e"
ANCHOR_FLOOR = "rho >= rho_star = A/c^2 with rho c^2 + p bounded below by a uniform positive constant"
ANCHOR_SUBLUMINAL = "0 < p' <= c^2"
ANCHOR_DERIV = "p' = K1 rho^A (derivative consistency)"
ANCHOR_SPD = "positive definiteness of A0 (Schur eigenvalues B4, B4, lambda3 > 0)"
ANCHOR_JAC = "the Jacobian dw/d(rho, v)"
ANCHOR_DET = "det dw/d(rho, v) = -c^6 Phi^3 Phi' / (c^2 - |v|^2)^2, which is always non-zero"
ANCHOR_BIJ = "injectivity of w(rho, v) (Phi strictly decreasing)"
ANCHOR_INV = "|v|^2 = c^4 |w_k|^2 / (c^2 - w0)^2 and Phi = sqrt((c^2 - w0)^2 - c^2 |w_k|^2) / c^2"
ANCHOR_AK = "symmetry of A0 w_t + Ak w_x = 0 on exact solutions"
ANCHOR_EQUIV = "the classical system can be transformed through v into the symmetric system"
ANCHOR_CONS = "conservation of sum D dx and sum S dx"
ANCHOR_ADM = "rho >= rho_star and |v| < c along the evolution"
ANCHOR_CONV = "convergence of the finite-volume solution"


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def resolve_path(spec):
    """Filesystem path or ``stock:NAME`` for the packaged JSON files."""
    if spec is None:
        raise ConfigError("missing input file")
    if str(spec).startswith("stock:"):
        name = str(spec)[len("stock:"):]
        res = resources.files("logeuler") / "data" / f"{name}.json"
        if not res.is_file():
            raise ConfigError(f"no stock file named {name!r}")
        return res
    return Path(spec)


def _load_eos(spec):
    path = resolve_path(spec)
    if isinstance(path, Path):
        return EosSpec.load(path)
    return EosSpec.from_json(path.read_text(encoding="utf-8"))


def _load_json(spec):
    path = resolve_path(spec)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {spec}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {spec}: {exc}") from None


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def _rel(a, b):
    return np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)


# --- check-eos ------------------------------------------------------------------

def cmd_check_eos(args, out: Path) -> Report:
    tol = scaled(args.tol_scale)
    eos = _load_eos(args.eos)
    rep = Report("check-eos", args.seed)
    rng = make_rng(args.seed)
    n = args.samples
    window = None
    if eos.family is Family.LOGARITHMIC:
        rs = eos.rho_star
        gate = eos.c**2 / math.e
        rep.add(check("coefficient_gate", eos.A > gate, eos.A - gate, 0.0, ANCHOR_GATE,
                      kind="admissibility", note=f"A = {eos.A:.6g}, c^2/e = {gate:.6g}"))
        try:
            window = lemma1_bounds(eos)
            lo, hi = window.rho_min, window.rho_max
        except AssumptionViolation:
            lo, hi = rs * (1 + 1e-6), 1e3 * rs
        rep.add(check("rho_star", rs > 0, rs, 0.0, ANCHOR_FLOOR, kind="admissibility"))
    else:
        lo, hi = 1e-2, 1e2
    rho = np.sort(np.exp(rng.uniform(math.log(lo), math.log(hi), n)))
    p = np.asarray(pressure(eos, rho))
    dp = np.asarray(dp_drho(eos, rho))
    d2p = np.asarray(d2p_drho2(eos, rho))
    h = 1e-5 * rho
    dp_fd = (np.asarray(pressure(eos, rho + h)) - np.asarray(pressure(eos, rho - h))) / (2 * h)
    d2p_fd = (np.asarray(dp_drho(eos, rho + h)) - np.asarray(dp_drho(eos, rho - h))) / (2 * h)
    err_dp = _rel(dp_fd, dp)
    err_d2p = _rel(d2p_fd, d2p)
    res = np.abs(np.asarray(ode_residual(eos, rho))) / rho
    rep.add(check("sound_speed_positive", bool(np.all(dp > 0)), float(dp.min()), 0.0, ANCHOR_SUBLUMINAL))
    rep.add(check("dp_finite_difference", float(err_dp.max()) <= tol["dp_fd"], float(err_dp.max()),
                  tol["dp_fd"], ANCHOR_DERIV))
    rep.add(check("d2p_finite_difference", float(err_d2p.max()) <= tol["d2p_fd"], float(err_d2p.max()),
                  tol["d2p_fd"], ANCHOR_DERIV))
    rep.add(check("ode_membership", float(res.max()) <= tol["ode_residual"], float(res.max()),
                  tol["ode_residual"], ANCHOR_ODE, expect_fail=not eos.is_family_member))
    sub = np.ones(n, dtype=bool)
    if eos.family is Family.LOGARITHMIC:
        wrong = np.abs(np.asarray(ode_residual(eos, rho, a_eff=1.0))) / rho
        rep.add(check("ode_membership_positive_label", float(wrong.min()) <= tol["ode_residual"],
                      float(wrong.min()), tol["ode_residual"], ANCHOR_ODE + " with A_eff = +1",
                      expect_fail=True))
        enth = rho * eos.c**2 + p
        rep.add(check("enthalpy_positive", bool(np.all(enth > 0)), float(enth.min()), 0.0, ANCHOR_FLOOR,
                      kind="admissibility"))
        sub = np.asarray(subluminal_check(eos, rho))
        rep.add(check("subluminal", bool(np.all(sub)), float(np.max(dp) / eos.c**2), 1.0, ANCHOR_SUBLUMINAL,
                      kind="admissibility"))
    path = out / "check_eos.csv"
    _write_csv(path, ["rho", "p", "dp", "d2p", "dp_fd_err", "d2p_fd_err", "ode_residual", "subluminal"],
               [(float(r), float(a), float(b), float(c), float(d), float(e), float(f), int(g))
                for r, a, b, c, d, e, f, g in zip(rho, p, dp, d2p, err_dp, err_d2p, res, sub)])
    rep.artifacts.append(str(path))
    return rep


# --- verify-symmetrizer -----------------------------------------------------------

def sample_states(eos, window, n, rng):
    """Core sample: forced corners, then log-uniform density, isotropic
    direction and ``|v|**2`` uniform in ``[0, 0.99 (1 - margin) c**2]``."""
    vmax2 = 0.99 * (1.0 - window.velocity_margin) * eos.c**2
    e = np.array([1.0, 0.0, 0.0])
    diag = np.ones(3) / math.sqrt(3.0)
    forced = [
        (window.rho_min, np.zeros(3)),
        (window.rho_min, math.sqrt(vmax2) * diag),
        (window.rho_max, math.sqrt(vmax2) * diag),
        (3.0 * window.rho_star, math.sqrt(vmax2) * e),
    ]
    states = [symmetrizer.PrimState(r, v) for r, v in forced[:n]]
    m = n - len(states)
    if m > 0:
        rho = np.exp(rng.uniform(math.log(window.rho_min), math.log(window.rho_max), m))
        d = rng.standard_normal((m, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        speed = np.sqrt(vmax2 * rng.uniform(0.0, 1.0, m))
        states += [symmetrizer.PrimState(float(r), s * di) for r, s, di in zip(rho, speed, d)]
    return states


def boundary_states(eos, window):
    """States on the margin ``|v|**2 = (1 - margin) c**2`` where ``lambda3 -> 0``."""
    vmax = math.sqrt(1.0 - window.velocity_margin) * eos.c
    return [
        symmetrizer.PrimState(window.rho_min, vmax * np.array([1.0, 0.0, 0.0])),
        symmetrizer.PrimState(2.0 * window.rho_star, vmax * np.array([0.0, 0.6, 0.8])),
    ]


def cmd_verify_symmetrizer(args, out: Path) -> Report:
    tol = scaled(args.tol_scale)
    eos = _load_eos(args.eos)
    if eos.family is not Family.LOGARITHMIC:
        raise ConfigError("verify-symmetrizer needs the logarithmic law")
    window = lemma1_bounds(eos)
    rep = Report("verify-symmetrizer", args.seed)
    states = sample_states(eos, window, args.samples, make_rng(args.seed))
    rows = []
    worst = dict(eig=0.0, fd=0.0, det=0.0, rt=0.0, inv=0.0, sym=0.0)
    min_det = math.inf
    min_lam3 = math.inf
    chol = coeff_pos = spd_all = phi_dec = True
    for s in states:
        spd = symmetrizer.check_A0_spd(eos, s, window=window)
        mats = symmetrizer.assemble_all(eos, s, window=window)
        worst["sym"] = max(worst["sym"], max(float(np.max(np.abs(m - m.T)) / np.max(np.abs(m)))
                                             for m in (mats.A0, mats.A1, mats.A2, mats.A3)))
        cs = symmetrizer.coeffs(eos, s, window=window)
        coeff_pos &= bool(cs.all_positive())
        chol &= spd.cholesky_ok
        spd_all &= spd.spd
        min_lam3 = min(min_lam3, spd.lambda3)
        worst["eig"] = max(worst["eig"], spd.eig_rel_err)
        J = symmetrizer.jacobian_w(eos, s, window=window)
        fd_err = float(np.max(np.abs(J - symmetrizer.jacobian_w_fd(eos, s))) / np.max(np.abs(J)))
        worst["fd"] = max(worst["fd"], fd_err)
        det = symmetrizer.jacobian_det(eos, s, window=window)
        min_det = min(min_det, det)
        worst["det"] = max(worst["det"], abs(np.linalg.det(J) - det) / abs(det))
        w = symmetrizer.to_sym(eos, s, window=window)
        back = symmetrizer.from_sym(eos, w, window=window)
        worst["rt"] = max(worst["rt"], abs(back.rho - s.rho) / s.rho,
                          float(np.max(np.abs(back.v - s.v))) / eos.c)
        v2, capital = symmetrizer.sym_invariants(eos, w)
        ref = float(symmetrizer.big_phi(eos, s.rho))
        worst["inv"] = max(worst["inv"], abs(v2 - s.speed2) / eos.c**2, abs(capital - ref) / ref)
        phi_dec &= float(symmetrizer.big_phi_prime(eos, s.rho)) < 0
        rows.append((s.rho, *map(float, s.v), spd.lambda1, spd.lambda3, det, fd_err, int(spd.spd), 0))
    rep.add(check("matrices_symmetric", worst["sym"] <= tol["eig_rel"], worst["sym"], tol["eig_rel"], ANCHOR_AK))
    rep.add(check("coefficients_positive", coeff_pos, float(not coeff_pos), 0.0, ANCHOR_SPD))
    rep.add(check("a0_cholesky", chol, float(not chol), 0.0, ANCHOR_SPD))
    rep.add(check("a0_spd_closed_form", spd_all and min_lam3 > 0, min_lam3, 0.0, ANCHOR_SPD))
    rep.add(check("schur_eigenvalues", worst["eig"] <= tol["eig_rel"], worst["eig"], tol["eig_rel"], ANCHOR_SPD))
    rep.add(check("jacobian_finite_difference", worst["fd"] <= tol["jacobian_fd"], worst["fd"],
                  tol["jacobian_fd"], ANCHOR_JAC))
    rep.add(check("jacobian_determinant", worst["det"] <= tol["det_rel"], worst["det"], tol["det_rel"], ANCHOR_DET))
    rep.add(check("jacobian_determinant_positive", min_det > 0, min_det, 0.0, ANCHOR_DET))
    rep.add(check("phi_decreasing", phi_dec, float(not phi_dec), 0.0, ANCHOR_BIJ))
    rep.add(check("roundtrip", worst["rt"] <= tol["roundtrip"], worst["rt"], tol["roundtrip"], ANCHOR_BIJ))
    rep.add(check("inverse_invariants", worst["inv"] <= tol["invariants"], worst["inv"], tol["invariants"],
                  ANCHOR_INV))
    # closed forms only: numeric cross-checks lose eps c^2 / (c^2 - |v|^2) on the margin
    lam3_edge = math.inf
    det_edge = math.inf
    for s in boundary_states(eos, window):
        spd = symmetrizer.check_A0_spd(eos, s, window=window)
        det = symmetrizer.jacobian_det(eos, s, window=window)
        lam3_edge = min(lam3_edge, spd.lambda3)
        det_edge = min(det_edge, det)
        rows.append((s.rho, *map(float, s.v), spd.lambda1, spd.lambda3, det, math.nan, int(spd.spd), 1))
    rep.add(check("boundary_lambda3_positive", lam3_edge > 0 and det_edge > 0, lam3_edge, 0.0, ANCHOR_SPD))
    sel = symmetrizer.select_ak_variant(eos)
    ok = sel.selected == ("velocity", "B4")
    best = min(r.residuals[-1] for r in sel.results if (r.diagonal, r.coupling) == ("velocity", "B4"))
    rep.add(check("ak_variant_unique", ok, best, 1e-2, ANCHOR_AK,
                  note=f"selected {sel.selected}"))
    path = out / "verify_symmetrizer.csv"
    _write_csv(path, ["rho", "v1", "v2", "v3", "lambda1", "lambda3", "det", "max_fd_err", "spd", "boundary"], rows)
    rep.artifacts.append(str(path))
    return rep


# --- equivalence ----------------------------------------------------------------

def cmd_equivalence(args, out: Path) -> Report:
    tol = scaled(args.tol_scale)
    sc = classical.EquivalenceScenario.from_dict(_load_json(args.scenario))
    rep = Report("equivalence", args.seed)
    lo = max(sc.rho_bar - abs(sc.perturbation), 1e-300)
    rho = np.linspace(lo, sc.rho_bar + abs(sc.perturbation), 64)
    member_res = float(np.max(np.abs(np.asarray(ode_residual(sc.eos, rho, a_eff=sc.params.A))) / rho))
    member = member_res <= tol["ode_residual"]
    rep.add(check("ode_membership", member, member_res, tol["ode_residual"], ANCHOR_ODE,
                  expect_fail=not sc.eos.is_family_member))
    result = classical.equivalence_study(sc)
    if all(e == 0 for e in result.errors):
        rep.add(check("transformed_difference_zero", True, 0.0, 0.0, ANCHOR_EQUIV))
    else:
        order = result.min_order
        rep.add(check("transformed_difference_order", order >= THRESHOLDS["equivalence_order"], order,
                      THRESHOLDS["equivalence_order"], ANCHOR_EQUIV, expect_fail=not member,
                      note="errors " + ", ".join(f"{e:.3e}" for e in result.errors)))
    path = out / "equivalence.csv"
    a, b = result.final
    classical.write_equivalence_csv(path, sc.eos, sc.params, a, b)
    conv = out / "equivalence_convergence.csv"
    _write_csv(conv, ["cells", "max_abs_diff"], [(n, e) for n, e in zip(result.cells, result.errors)])
    rep.artifacts += [str(path), str(conv)]
    return rep


# --- run ------------------------------------------------------------------------

def cmd_run(args, out: Path) -> Report:
    tol = scaled(args.tol_scale)
    sc = hydro.HydroScenario.from_dict(_load_json(args.scenario))
    rep = Report("run", args.seed)
    res = hydro.run(sc)
    rs = sc.eos.rho_star
    rho_min = min(float(s.rho.min()) for s in res.snapshots)
    vmax = max(float(np.abs(s.v).max()) for s in res.snapshots)
    rep.add(check("admissibility_preserved", rho_min >= rs and vmax < sc.eos.c,
                  min(rho_min / rs - 1.0, 1.0 - vmax / sc.eos.c), 0.0, ANCHOR_ADM, kind="admissibility"))
    if sc.bc is hydro.Boundary.PERIODIC:
        per = max(1.0, res.steps / 1000.0)
        for name, drift in (("conservation_D", res.drift_D), ("conservation_S", res.drift_S)):
            rep.add(check(name, drift / per <= tol["conservation"], drift / per, tol["conservation"], ANCHOR_CONS))
    path = out / "snapshots.csv"
    hydro.write_snapshots(path, res.snapshots)
    rep.artifacts.append(str(path))
    study = sc.study or {}
    kind = study.get("kind")
    if kind == "smooth":
        resolutions = tuple(int(n) for n in study.get("resolutions", (128, 256, 512)))
        errors, orders = hydro.smooth_convergence(sc, resolutions)
        order = min(orders)
        rep.add(check("smooth_self_convergence", order >= THRESHOLDS["smooth_order"], order,
                      THRESHOLDS["smooth_order"], ANCHOR_CONV))
        rows = list(zip(resolutions[:-1], errors))
    elif kind == "reference":
        resolutions = tuple(int(n) for n in study.get("resolutions", (512, 1024, 2048)))
        reference = int(study.get("reference", 8192))
        errors, order = hydro.reference_convergence(sc, resolutions, reference)
        rep.add(check("reference_l1_order", order >= THRESHOLDS["reference_order"], order,
                      THRESHOLDS["reference_order"], ANCHOR_CONV))
        rows = list(zip(resolutions, errors))
    elif kind is not None:
        raise ConfigError(f"unknown study kind {kind!r}")
    if kind is not None:
        conv = out / "convergence.csv"
        _write_csv(conv, ["cells", "l1_error"], rows)
        rep.artifacts.append(str(conv))
    return rep


COMMANDS = {
    "check-eos": (cmd_check_eos, "eos"),
    "verify-symmetrizer": (cmd_verify_symmetrizer, "eos"),
    "equivalence": (cmd_equivalence, "scenario"),
    "run": (cmd_run, "scenario"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="logeuler", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--eos", help="EOS JSON file or stock:NAME")
        p.add_argument("--scenario", help="scenario JSON file or stock:NAME")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", default="logeuler-out", help="output directory (default: %(default)s)")
        p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every error tolerance")
    return parser


def _error_code(exc):
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (AssumptionViolation, SuperluminalState, InadmissibleTarget)):
        return EXIT_ADMISSIBILITY
    if isinstance(exc, RecoveryFailure):
        return EXIT_RECOVERY
    return EXIT_CHECK


def execute(argv=None):
    """Run one verb; returns the :class:`Report` (also written to ``--out``)."""
    args = build_parser().parse_args(argv)
    fn, needs = COMMANDS[args.command]
    out = Path(args.out)
    rep = Report(args.command, args.seed)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        rep.error, rep.error_code = f"ConfigError: cannot create {out}: {exc}", EXIT_CONFIG
        return rep
    try:
        if getattr(args, needs) is None:
            raise ConfigError(f"{args.command} requires --{needs}")
        if args.samples < 1:
            raise ConfigError("--samples must be positive")
        if not args.tol_scale > 0:
            raise ConfigError("--tol-scale must be positive")
        rep = fn(args, out)
    except (LogEulerError, ValueError) as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
        rep.error_code = _error_code(exc) if isinstance(exc, LogEulerError) else EXIT_CONFIG
    (out / "report.json").write_text(rep.to_json(), encoding="utf-8")
    return rep


def main(argv=None) -> int:
    rep = execute(argv)
    print(rep.summary())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
