"""Finite-volume solver for the planar relativistic Euler equations.

Conserved variables (transverse velocities zero)::

    D = (rho c^2 + p) / (c^2 - v^2) - p / c^2
    S = (rho c^2 + p) v / (c^2 - v^2)

with fluxes ``(S, S v + p)``.  Primitive recovery uses ``v = S / (D + p/c^2)``
which reduces the inversion to the scalar equation

    f(rho) = c^2 (rho - D) + S^2 / (D + p(rho)/c^2) = 0,

monotone on ``[rho_star, D]`` for admissible states.

The update is SSP-RK2 in time, piecewise-linear reconstruction of
``(rho, v)`` (central slopes or minmod) and an HLL or Rusanov interface flux.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .eos import EosSpec, Family, dp_drho, lemma1_bounds, pressure
from .errors import (
    AssumptionViolation,
    CflViolation,
    ConfigError,
    InadmissibleTarget,
    RecoveryFailure,
    SuperluminalState,
)

logger = logging.getLogger(__name__)

GHOST = 2
MAX_NEWTON = 50


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"


class Limiter(str, enum.Enum):
    NONE = "none"
    MINMOD = "minmod"


class Riemann(str, enum.Enum):
    HLL = "hll"
    RUSANOV = "rusanov"


def _as_enum(cls, value):
    return value if isinstance(value, cls) else cls(str(value).lower())


@dataclass(frozen=True)
class SolverConfig:
    eos: EosSpec
    cfl: float = 0.45
    t_end: float = 0.1
    limiter: Limiter = Limiter.MINMOD
    riemann: Riemann = Riemann.HLL
    clamp: bool = False

    def __post_init__(self):
        if not 0 < self.cfl < 1:
            raise ConfigError("cfl must lie in (0, 1)")
        if self.eos.family is not Family.LOGARITHMIC:
            raise ConfigError("the relativistic solver uses the logarithmic law")
        try:
            object.__setattr__(self, "limiter", _as_enum(Limiter, self.limiter))
            object.__setattr__(self, "riemann", _as_enum(Riemann, self.riemann))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class ConsState:
    D: float
    S: float


@dataclass
class Grid1D:
    """Conserved ``(D, S)`` with two ghost cells per side; ``U`` has shape ``(2, n + 4)``."""

    U: np.ndarray
    dx: float
    bc: Boundary = Boundary.PERIODIC
    t: float = 0.0
    x0: float = 0.0

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=float)
        self.bc = Boundary(self.bc)
        if self.U.ndim != 2 or self.U.shape[0] != 2 or self.U.shape[1] < 2 * GHOST + 2:
            raise ValueError("U must have shape (2, n + 4) with n >= 2")
        self.sync()

    @classmethod
    def from_interior(cls, D, S, dx, bc=Boundary.PERIODIC, t=0.0, x0=0.0):
        n = len(D)
        U = np.zeros((2, n + 2 * GHOST))
        U[0, GHOST:-GHOST] = D
        U[1, GHOST:-GHOST] = S
        return cls(U, dx, bc, t, x0)

    @property
    def n(self) -> int:
        return self.U.shape[1] - 2 * GHOST

    @property
    def interior(self):
        return self.U[:, GHOST:-GHOST]

    @property
    def x(self):
        return self.x0 + self.dx * (np.arange(self.n) + 0.5)

    def sync(self):
        fill_ghosts(self.U, self.bc)
        return self

    def totals(self):
        """``(sum D dx, sum S dx)`` summed exactly."""
        d, s = self.interior
        return math.fsum(d) * self.dx, math.fsum(s) * self.dx


def fill_ghosts(q, bc):
    if Boundary(bc) is Boundary.PERIODIC:
        q[..., :GHOST] = q[..., -2 * GHOST:-GHOST]
        q[..., -GHOST:] = q[..., GHOST:2 * GHOST]
    else:
        q[..., :GHOST] = q[..., GHOST:GHOST + 1]
        q[..., -GHOST:] = q[..., -GHOST - 1:-GHOST]
    return q


# --- pointwise physics ---------------------------------------------------------

def prim_to_cons(eos: EosSpec, rho, v):
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    c2 = eos.c**2
    if np.any(v * v >= c2):
        raise SuperluminalState("|v| must stay below c")
    p = pressure(eos, rho)
    g = (rho * c2 + p) / (c2 - v * v)
    return (g - p / c2)[()], (g * v)[()]


def flux(eos: EosSpec, rho, v):
    """``(S, S v + p)``."""
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    c2 = eos.c**2
    if np.any(v * v >= c2):
        raise SuperluminalState("|v| must stay below c")
    p = pressure(eos, rho)
    s = (rho * c2 + p) / (c2 - v * v) * v
    return s[()], (s * v + p)[()]


def char_speeds(eos: EosSpec, rho, v):
    """``(v -+ cs) / (1 -+ v cs / c^2)`` with ``cs = sqrt(p')``."""
    v = np.asarray(v, dtype=float)
    cs = np.sqrt(dp_drho(eos, rho))
    c2 = eos.c**2
    return ((v - cs) / (1.0 - v * cs / c2))[()], ((v + cs) / (1.0 + v * cs / c2))[()]


def wave_speeds(eos: EosSpec, rho_l, v_l, rho_r, v_r):
    """HLL bounds ``(s_min, s_max)`` over both states."""
    for v in (v_l, v_r):
        if np.any(np.asarray(v) ** 2 >= eos.c**2):
            raise SuperluminalState("|v| must stay below c")
    lm_l, lp_l = char_speeds(eos, rho_l, v_l)
    lm_r, lp_r = char_speeds(eos, rho_r, v_r)
    return np.minimum(lm_l, lm_r)[()], np.maximum(lp_l, lp_r)[()]


def cons_to_prim(eos: EosSpec, D, S, *, rho_guess=None, rtol=1e-11, clamp=False, window=None):
    """Invert ``(D, S) -> (rho, v)`` by bracketed Newton on ``rho``.

    The bracket is ``[rho_star, D]``; a state without a sign change there has
    no admissible preimage and raises :class:`RecoveryFailure` (or is clamped
    to the floor when ``clamp`` is set).
    """
    scalar = np.ndim(D) == 0 and np.ndim(S) == 0
    D = np.atleast_1d(np.asarray(D, dtype=float))
    S = np.atleast_1d(np.asarray(S, dtype=float))
    win = lemma1_bounds(eos) if window is None else window
    c2 = eos.c**2
    rs = win.rho_star
    S2 = S * S

    def residual(r):
        q = D + pressure(eos, r) / c2
        ok = q > 0
        qs = np.where(ok, q, 1.0)
        f = np.where(ok, c2 * (r - D) + S2 / qs, -np.inf)
        fp = c2 - S2 * dp_drho(eos, r) / (c2 * qs * qs)
        return f, fp, q

    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.full_like(D, rs)
        f_lo = residual(lo)[0]
        bad = ~np.isfinite(D) | ~np.isfinite(S) | (D < rs) | (f_lo > 0)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            if not clamp:
                raise RecoveryFailure(
                    f"no admissible density for D = {D[i]:.17g}, S = {S[i]:.17g} in cell {i}",
                    index=i, state=(float(D[i]), float(S[i])), bracket=(rs, float(D[i])),
                )
            logger.warning("clamping %d unrecoverable cells to the density floor", int(bad.sum()))
        hi = np.where(bad, rs, np.maximum(D, rs))
        x = hi.copy()
        if rho_guess is not None:
            g = np.asarray(rho_guess, dtype=float)
            inside = (g > lo) & (g < hi)
            x = np.where(inside, g, x)
        for _ in range(MAX_NEWTON):
            f, fp, _q = residual(x)
            lo = np.where(f < 0, x, lo)
            hi = np.where(f > 0, x, hi)
            xn = x - f / fp
            use_bisect = ~np.isfinite(xn) | (xn < lo) | (xn > hi)
            xn = np.where(use_bisect, 0.5 * (lo + hi), xn)
            xn = np.where((f == 0) | bad, x, xn)
            done = np.abs(xn - x) <= 1e-15 * x
            x = xn
            if np.all(done):
                break
        f, _fp, q = residual(x)
        scale = c2 * np.maximum(np.abs(D), rs)
        unconverged = ~bad & ~(np.abs(f) <= rtol * scale)
        if np.any(unconverged):
            i = int(np.flatnonzero(unconverged)[0])
            raise RecoveryFailure(
                f"recovery did not converge in cell {i} (residual {f[i]:.3g})",
                index=i, state=(float(D[i]), float(S[i])), bracket=(float(lo[i]), float(hi[i])),
            )
        v = S / q
        if clamp and np.any(bad):
            x = np.where(bad, win.rho_min, x)
            vmax = math.sqrt(1.0 - win.velocity_margin) * eos.c
            v = np.where(bad, np.clip(np.nan_to_num(v), -vmax, vmax), v)
    fast = v * v >= c2
    if np.any(fast):
        i = int(np.flatnonzero(fast)[0])
        raise InadmissibleTarget(f"recovered |v| >= c in cell {i}", index=i,
                                 state=(float(D[i]), float(S[i])))
    if scalar:
        return float(x[0]), float(v[0])
    return x, v


# --- scheme --------------------------------------------------------------------

def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _slopes(q, limiter):
    left = q[..., 1:-1] - q[..., :-2]
    right = q[..., 2:] - q[..., 1:-1]
    if limiter is Limiter.MINMOD:
        return _minmod(left, right)
    return 0.5 * (left + right)


def _numerical_flux(eos, riemann, rl, vl, rr, vr):
    dl, sl = prim_to_cons(eos, rl, vl)
    dr, sr = prim_to_cons(eos, rr, vr)
    fdl, fsl = flux(eos, rl, vl)
    fdr, fsr = flux(eos, rr, vr)
    smin, smax = wave_speeds(eos, rl, vl, rr, vr)
    if riemann is Riemann.RUSANOV:
        a = np.maximum(np.abs(smin), np.abs(smax))
        return (0.5 * (fdl + fdr) - 0.5 * a * (dr - dl),
                0.5 * (fsl + fsr) - 0.5 * a * (sr - sl))
    lo = np.minimum(smin, 0.0)
    hi = np.maximum(smax, 0.0)
    inv = 1.0 / (hi - lo)
    fd = (hi * fdl - lo * fdr + lo * hi * (dr - dl)) * inv
    fs = (hi * fsl - lo * fsr + lo * hi * (sr - sl)) * inv
    return fd, fs


def _primitives(grid_u, bc, cfg, guess=None):
    """Recovered ``(rho, v)`` on interior plus ghost cells."""
    D, S = grid_u[:, GHOST:-GHOST]
    rho, v = cons_to_prim(cfg.eos, D, S, rho_guess=guess, clamp=cfg.clamp)
    prim = np.zeros((2, grid_u.shape[1]))
    prim[0, GHOST:-GHOST] = rho
    prim[1, GHOST:-GHOST] = v
    return fill_ghosts(prim, bc)


def _rhs(prim, dx, cfg):
    slope = _slopes(prim, cfg.limiter)          # cells 1 .. n+2
    q = prim[:, 1:-1]
    left = q[:, :-1] + 0.5 * slope[:, :-1]      # interface i+1/2, left side, i = 1 .. n+1
    right = q[:, 1:] - 0.5 * slope[:, 1:]
    if np.any(left[0] <= 0) or np.any(right[0] <= 0):
        raise RecoveryFailure("reconstruction produced a non-positive density")
    fd, fs = _numerical_flux(cfg.eos, cfg.riemann, left[0], left[1], right[0], right[1])
    return -np.vstack([np.diff(fd), np.diff(fs)]) / dx


def max_signal_speed(eos, rho, v):
    lm, lp = char_speeds(eos, rho, v)
    return float(np.max(np.maximum(np.abs(lm), np.abs(lp))))


def stable_dt(grid: Grid1D, cfg: SolverConfig, prim=None):
    if prim is None:
        prim = _primitives(grid.U, grid.bc, cfg)
    inner = prim[:, GHOST:-GHOST]
    return cfg.cfl * grid.dx / max_signal_speed(cfg.eos, inner[0], inner[1])


def step(grid: Grid1D, cfg: SolverConfig, dt=None, *, prim=None) -> Grid1D:
    """One SSP-RK2 step; returns a new grid."""
    if prim is None:
        prim = _primitives(grid.U, grid.bc, cfg)
    inner = prim[:, GHOST:-GHOST]
    speed = max_signal_speed(cfg.eos, inner[0], inner[1])
    if dt is None:
        dt = cfg.cfl * grid.dx / speed
    if not dt > 0 or dt * speed / grid.dx > cfg.cfl * (1 + 1e-12):
        raise CflViolation(f"dt = {dt!r} exceeds the Courant limit {cfg.cfl}")
    u0 = grid.U
    u1 = u0.copy()
    u1[:, GHOST:-GHOST] += dt * _rhs(prim, grid.dx, cfg)
    fill_ghosts(u1, grid.bc)
    prim1 = _primitives(u1, grid.bc, cfg, guess=inner[0])
    u2 = u0.copy()
    u2[:, GHOST:-GHOST] = 0.5 * (u0[:, GHOST:-GHOST] + u1[:, GHOST:-GHOST]
                                 + dt * _rhs(prim1, grid.dx, cfg))
    return Grid1D(u2, grid.dx, grid.bc, grid.t + dt, grid.x0)


# --- scenarios -----------------------------------------------------------------

_GAUSS = (np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)]) / 2, np.array([5.0, 8.0, 5.0]) / 18)


@dataclass
class HydroScenario:
    eos: EosSpec
    cells: int = 256
    bc: Boundary = Boundary.PERIODIC
    cfl: float = 0.45
    t_end: float = 0.1
    init: dict = field(default_factory=lambda: {"type": "smooth_wave"})
    limiter: Limiter = Limiter.MINMOD
    riemann: Riemann = Riemann.HLL
    domain: tuple = (0.0, 1.0)
    outputs: int = 2
    steps: int | None = None
    study: dict | None = None

    _KEYS = {"eos", "cells", "bc", "cfl", "t_end", "init", "limiter", "riemann", "domain",
             "outputs", "steps", "study"}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a JSON object")
        unknown = set(data) - cls._KEYS
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        try:
            kw = dict(data)
            kw["eos"] = EosSpec.from_dict(data["eos"])
            kw["cells"] = int(data["cells"])
            kw["t_end"] = float(data.get("t_end", 0.1))
            kw["cfl"] = float(data.get("cfl", 0.45))
            kw["bc"] = Boundary(data.get("bc", "periodic"))
            kw["limiter"] = Limiter(data.get("limiter", "minmod"))
            kw["riemann"] = Riemann(data.get("riemann", "hll"))
            kw["domain"] = tuple(float(x) for x in data.get("domain", (0.0, 1.0)))
            kw["outputs"] = int(data.get("outputs", 2))
            if data.get("steps") is not None:
                kw["steps"] = int(data["steps"])
            init = data.get("init", {"type": "smooth_wave"})
            if not isinstance(init, dict) or init.get("type") not in ("smooth_wave", "riemann"):
                raise ConfigError("init.type must be 'smooth_wave' or 'riemann'")
        except KeyError as exc:
            raise ConfigError(f"scenario lacks {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad scenario value: {exc}") from None
        sc = cls(**kw)
        if sc.cells < 2 or len(sc.domain) != 2 or sc.domain[1] <= sc.domain[0] or sc.outputs < 1:
            raise ConfigError("scenario needs cells >= 2, an increasing domain and outputs >= 1")
        sc.config()
        return sc

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        return cls.from_dict(data)

    def config(self) -> SolverConfig:
        return SolverConfig(self.eos, self.cfl, self.t_end, self.limiter, self.riemann)

    def with_cells(self, cells):
        return replace(self, cells=int(cells))

    def primitive_profile(self, x):
        """Initial ``(rho, v)`` at points ``x``."""
        init = self.init
        rs = self.eos.rho_star
        x0, x1 = self.domain
        if init["type"] == "smooth_wave":
            k = 2.0 * math.pi * float(init.get("wavenumber", 1)) / (x1 - x0)
            phase = np.sin(k * (x - x0))
            rho = float(init.get("rho0", 2.0 * rs)) + float(init.get("rho_amp", 0.1 * rs)) * phase
            v = float(init.get("v0", 0.0)) + float(init.get("v_amp", 0.05 * self.eos.c)) * phase
            return rho, v
        split = float(init.get("x_split", 0.5 * (x0 + x1)))
        left = x < split
        rho = np.where(left, float(init.get("rho_left", 5.0 * rs)), float(init.get("rho_right", 2.0 * rs)))
        v = np.where(left, float(init.get("v_left", 0.0)), float(init.get("v_right", 0.0)))
        return rho, v

    def initial_grid(self) -> Grid1D:
        x0, x1 = self.domain
        dx = (x1 - x0) / self.cells
        centers = x0 + dx * (np.arange(self.cells) + 0.5)
        check_initial_data(self.eos, *self.primitive_profile(centers))
        if self.init["type"] == "riemann":
            rho, v = self.primitive_profile(centers)
            D, S = prim_to_cons(self.eos, rho, v)
        else:
            D = np.zeros(self.cells)
            S = np.zeros(self.cells)
            for node, weight in zip(*_GAUSS):
                rho, v = self.primitive_profile(centers + node * dx)
                d, s = prim_to_cons(self.eos, rho, v)
                D += weight * d
                S += weight * s
        return Grid1D.from_interior(D, S, dx, self.bc, 0.0, x0)


def check_initial_data(eos, rho, v, window=None):
    """Reject data outside ``rho >= rho_star + delta``, ``v^2 <= (1 - delta) c^2``."""
    win = lemma1_bounds(eos) if window is None else window
    rho = np.asarray(rho)
    v = np.asarray(v)
    if np.any(rho < win.rho_min):
        raise AssumptionViolation(f"initial density below rho_star + delta = {win.rho_min:.6g}")
    if np.any(v * v > (1.0 - win.velocity_margin) * eos.c**2):
        raise AssumptionViolation("initial speed violates |v|^2 <= (1 - delta) c^2")


@dataclass
class Snapshot:
    t: float
    x: np.ndarray
    rho: np.ndarray
    v: np.ndarray
    p: np.ndarray
    D: np.ndarray
    S: np.ndarray


@dataclass
class RunResult:
    grid: Grid1D
    snapshots: list
    steps: int
    drift_D: float
    drift_S: float


def _snapshot(grid, eos, prim):
    rho, v = prim[:, GHOST:-GHOST]
    D, S = grid.interior
    return Snapshot(grid.t, grid.x, rho.copy(), v.copy(), np.asarray(pressure(eos, rho)), D.copy(), S.copy())


def _check_admissible(eos, rho, v, t):
    rs = eos.rho_star
    if np.any(rho < rs) or np.any(v * v >= eos.c**2):
        i = int(np.flatnonzero((rho < rs) | (v * v >= eos.c**2))[0])
        raise InadmissibleTarget(f"cell {i} left the admissible set at t = {t:.6g}", index=i)


def run(scenario: HydroScenario) -> RunResult:
    """Evolve to ``t_end`` (or for exactly ``steps`` steps) and collect snapshots."""
    cfg = scenario.config()
    grid = scenario.initial_grid()
    d0, s0 = grid.totals()
    prim = _primitives(grid.U, grid.bc, cfg)
    snaps = [_snapshot(grid, cfg.eos, prim)]
    if scenario.steps is not None:
        out_steps = set(np.linspace(0, scenario.steps, scenario.outputs + 1).round().astype(int).tolist()[1:])
        for n in range(1, scenario.steps + 1):
            grid = step(grid, cfg, prim=prim)
            prim = _primitives(grid.U, grid.bc, cfg, guess=prim[0, GHOST:-GHOST])
            _check_admissible(cfg.eos, *prim[:, GHOST:-GHOST], grid.t)
            if n in out_steps:
                snaps.append(_snapshot(grid, cfg.eos, prim))
        nsteps = scenario.steps
    else:
        marks = list(np.linspace(0.0, cfg.t_end, scenario.outputs + 1)[1:])
        nsteps = 0
        while marks:
            target = marks[0]
            dt = stable_dt(grid, cfg, prim)
            if grid.t + dt >= target * (1 - 1e-14):
                dt = target - grid.t
            if dt > 0:
                grid = step(grid, cfg, dt, prim=prim)
                nsteps += 1
                prim = _primitives(grid.U, grid.bc, cfg, guess=prim[0, GHOST:-GHOST])
                _check_admissible(cfg.eos, *prim[:, GHOST:-GHOST], grid.t)
            if grid.t >= target * (1 - 1e-14):
                grid.t = target
                snaps.append(_snapshot(grid, cfg.eos, prim))
                marks.pop(0)
    d1, s1 = grid.totals()
    scale = abs(d0)
    return RunResult(grid, snaps, nsteps, abs(d1 - d0) / scale, abs(s1 - s0) / (scale * cfg.eos.c))


def write_snapshots(path, snapshots):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,x,rho,v,p,D,S\n")
        for snap in snapshots:
            for row in zip(snap.x, snap.rho, snap.v, snap.p, snap.D, snap.S):
                fh.write(f"{snap.t:.17g}," + ",".join(f"{val:.17g}" for val in row) + "\n")


# --- convergence studies -------------------------------------------------------

def restrict(values, factor):
    """Average consecutive groups of ``factor`` cells."""
    return values.reshape(-1, factor).mean(axis=1)


def smooth_convergence(scenario: HydroScenario, resolutions=(128, 256, 512)):
    """Self-convergence: L1 differences of ``D`` between successive resolutions."""
    finals = {n: run(replace(scenario.with_cells(n), steps=None)).grid for n in resolutions}
    errors = []
    for coarse, fine in zip(resolutions, resolutions[1:]):
        g = finals[coarse]
        errors.append(float(np.sum(np.abs(g.interior[0] - restrict(finals[fine].interior[0], fine // coarse))) * g.dx))
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    return errors, orders


def reference_convergence(scenario: HydroScenario, resolutions=(512, 1024, 2048), reference=8192):
    """L1 error of ``D`` against a high-resolution run; least-squares order."""
    ref = run(replace(scenario.with_cells(reference), steps=None)).grid.interior[0]
    errors = []
    for n in resolutions:
        g = run(replace(scenario.with_cells(n), steps=None)).grid
        errors.append(float(np.sum(np.abs(g.interior[0] - restrict(ref, reference // n))) * g.dx))
    h = np.log([1.0 / n for n in resolutions])
    slope = float(np.polyfit(h, np.log(errors), 1)[0])
    return errors, slope
