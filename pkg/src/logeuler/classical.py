"""Sound-speed change of variables for the classical isentropic Euler system.

The map ``v(rho) = (2/A) (sqrt(p'(rho)) - B)`` turns

    rho_t + (rho u)_x = 0,        rho (u_t + u u_x) + p_x = 0

into the symmetric system

    v_t + B u_x = -u v_x - (A/2) v u_x,
    u_t + B v_x = -u u_x - (A/2) v v_x

precisely when ``A p'/p'' = rho`` (see :func:`logeuler.eos.ode_residual`).
Everything here works on a 1D periodic grid with fourth-order central
differences; :func:`evolve_pair` integrates both systems independently with
classical RK4 so the equivalence can be measured.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._numerics import ddx4
from .eos import EosSpec, Family, d2p_drho2, dp_drho, pressure
from .errors import (
    BlowupDetected,
    CflViolation,
    ConfigError,
    GridTooSmall,
    NonpositiveDensity,
    NonpositiveSoundSpeed,
    OutOfRange,
)

MIN_CELLS = 8


@dataclass(frozen=True)
class SymmetryParams:
    A: float
    B: float = 0.0

    def __post_init__(self):
        if self.A == 0 or not math.isfinite(self.A) or not math.isfinite(self.B):
            raise ConfigError("symmetry parameters need finite A != 0 and finite B")

    @classmethod
    def for_eos(cls, eos: EosSpec, B=0.0):
        """Parameters that make ``eos`` equivalent to the symmetric system."""
        return cls(A=eos.ode_parameter, B=B)


def _grid_arrays(*arrays):
    out = [np.asarray(a, dtype=float) for a in arrays]
    n = out[0].shape
    if any(a.ndim != 1 or a.shape != n for a in out):
        raise ValueError("fields must be 1D arrays of equal length")
    if n[0] < MIN_CELLS:
        raise GridTooSmall(f"need at least {MIN_CELLS} cells, got {n[0]}")
    return out


@dataclass
class ClassicalField1D:
    """Density and velocity on a periodic grid with spacing ``dx``."""

    rho: np.ndarray
    u: np.ndarray
    dx: float
    t: float = 0.0

    def __post_init__(self):
        self.rho, self.u = _grid_arrays(self.rho, self.u)
        if np.any(~np.isfinite(self.rho)) or np.any(self.rho <= 0):
            raise NonpositiveDensity("density must be positive everywhere")
        if not self.dx > 0:
            raise ValueError("dx must be positive")

    @property
    def x(self):
        return self.dx * np.arange(self.rho.size)


@dataclass
class SymmetricField1D:
    v: np.ndarray
    u: np.ndarray
    dx: float
    t: float = 0.0

    def __post_init__(self):
        self.v, self.u = _grid_arrays(self.v, self.u)


def v_of_rho(eos: EosSpec, params: SymmetryParams, rho):
    s2 = np.asarray(dp_drho(eos, rho))
    if np.any(s2 <= 0):
        raise NonpositiveSoundSpeed("p'(rho) must be positive")
    out = (2.0 / params.A) * (np.sqrt(s2) - params.B)
    return out[()]


def rho_of_v(eos: EosSpec, params: SymmetryParams, v):
    """Closed-form inverse of :func:`v_of_rho`."""
    s = params.B + 0.5 * params.A * np.asarray(v, dtype=float)
    if np.any(~(s > 0)):
        raise OutOfRange("B + A v / 2 must be positive")
    s2 = s * s
    if eos.family is Family.LOGARITHMIC:
        out = eos.K1 / s2
    elif eos.family is Family.LINEAR_PLUS_CUBIC:
        arg = (s2 / eos.K1 - 1.0) / 3.0
        if np.any(arg <= 0):
            raise OutOfRange("sound speed below the minimum of the cubic law")
        out = np.sqrt(arg)
    else:
        out = (s2 / eos.K1) ** (1.0 / eos.A)
    return out[()]


def dv_drho(eos: EosSpec, params: SymmetryParams, rho):
    """Analytic derivative ``p'' / (A sqrt(p'))`` of the change of variables."""
    out = np.asarray(d2p_drho2(eos, rho)) / (params.A * np.sqrt(np.asarray(dp_drho(eos, rho))))
    return out[()]


# --- residuals and right-hand sides -------------------------------------------

def residual_classical(field: ClassicalField1D, eos: EosSpec, rho_t, u_t):
    """Pointwise residuals (mass, momentum) of the classical system.

    Time derivatives come from the caller; space derivatives are fourth-order
    central differences.
    """
    rho, u, dx = field.rho, field.u, field.dx
    rho_t, u_t = _grid_arrays(rho_t, u_t)
    r_mass = rho_t + ddx4(rho * u, dx)
    r_mom = rho * (u_t + u * ddx4(u, dx)) + ddx4(pressure(eos, rho), dx)
    return r_mass, r_mom


def residual_symmetric(v, u, dx, params: SymmetryParams, v_t, u_t):
    v, u, v_t, u_t = _grid_arrays(v, u, v_t, u_t)
    vx, ux = ddx4(v, dx), ddx4(u, dx)
    half_a = 0.5 * params.A
    r1 = v_t + params.B * ux + u * vx + half_a * v * ux
    r2 = u_t + params.B * vx + u * ux + half_a * v * vx
    return r1, r2


def classical_rhs(rho, u, dx, eos: EosSpec):
    rho_t = -ddx4(rho * u, dx)
    u_t = -u * ddx4(u, dx) - ddx4(pressure(eos, rho), dx) / rho
    return rho_t, u_t


def symmetric_rhs(v, u, dx, params: SymmetryParams):
    vx, ux = ddx4(v, dx), ddx4(u, dx)
    half_a = 0.5 * params.A
    v_t = -params.B * ux - u * vx - half_a * v * ux
    u_t = -params.B * vx - u * ux - half_a * v * vx
    return v_t, u_t


# --- paired evolution --------------------------------------------------------

def _rk4(y, rhs, dt):
    k1 = rhs(y)
    k2 = rhs(tuple(a + 0.5 * dt * b for a, b in zip(y, k1)))
    k3 = rhs(tuple(a + 0.5 * dt * b for a, b in zip(y, k2)))
    k4 = rhs(tuple(a + dt * b for a, b in zip(y, k3)))
    return tuple(
        a + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )


def max_wave_speed(eos: EosSpec, rho, u):
    return float(np.max(np.abs(u) + np.sqrt(dp_drho(eos, rho))))


def _gradient_scale(eos, rho, u, dx):
    return max(
        float(np.max(np.abs(ddx4(u, dx)))),
        float(np.max(np.abs(ddx4(np.sqrt(dp_drho(eos, rho)), dx)))),
    )


def evolve_pair(init: ClassicalField1D, eos: EosSpec, params: SymmetryParams, t_end, dt=None,
                *, courant=0.2, max_courant=1.0, blowup_factor=1e3):
    """Integrate the classical and the symmetric system from matched data.

    Returns ``(classical, symmetric)`` final fields.  ``dt`` defaults to
    ``courant * dx / max(|u| + sqrt(p'))`` and is shortened so the last step
    lands on ``t_end``.  A run whose velocity or sound-speed gradient grows
    beyond ``blowup_factor`` times its initial value raises
    :class:`BlowupDetected`.
    """
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    dx = init.dx
    speed = max_wave_speed(eos, init.rho, init.u)
    if dt is None:
        dt = courant * dx / speed
    if not dt > 0:
        raise CflViolation("time step must be positive")
    nsteps = max(1, math.ceil(t_end / dt - 1e-12)) if t_end > 0 else 0
    if nsteps:
        dt = t_end / nsteps
    if dt * speed / dx > max_courant:
        raise CflViolation(f"Courant number {dt * speed / dx:.3g} exceeds {max_courant}")

    base = _gradient_scale(eos, init.rho, init.u, dx)
    limit = blowup_factor * base

    def classical(y):
        return classical_rhs(y[0], y[1], dx, eos)

    def symmetric(y):
        return symmetric_rhs(y[0], y[1], dx, params)

    ya = (init.rho.copy(), init.u.copy())
    yb = (np.asarray(v_of_rho(eos, params, init.rho), dtype=float), init.u.copy())
    for n in range(nsteps):
        try:
            ya = _rk4(ya, classical, dt)
            yb = _rk4(yb, symmetric, dt)
        except (NonpositiveDensity, NonpositiveSoundSpeed) as exc:
            raise BlowupDetected(f"stage state left the domain of p at step {n + 1}: {exc}") from None
        if not (np.all(np.isfinite(ya[0])) and np.all(np.isfinite(yb[0]))):
            raise BlowupDetected(f"non-finite state after step {n + 1}")
        if np.any(ya[0] <= 0):
            raise BlowupDetected(f"density lost positivity after step {n + 1}")
        if base > 0:
            grad = max(float(np.max(np.abs(ddx4(ya[1], dx)))), float(np.max(np.abs(ddx4(yb[1], dx)))))
            if grad > limit:
                raise BlowupDetected(f"max |u_x| = {grad:.3g} exceeds {limit:.3g} at step {n + 1}")
    t = init.t + nsteps * dt
    return (
        ClassicalField1D(ya[0], ya[1], dx, t),
        SymmetricField1D(yb[0], yb[1], dx, t),
    )


# --- scenario-driven study -----------------------------------------------------

@dataclass
class EquivalenceScenario:
    eos: EosSpec
    params: SymmetryParams
    cells: int = 64
    t_end: float = 0.1
    perturbation: float = 0.01
    rho_bar: float = 2.0
    velocity_perturbation: float = 0.0
    length: float = 2.0 * math.pi
    levels: int = 3

    def initial_field(self, cells=None):
        n = self.cells if cells is None else cells
        dx = self.length / n
        x = dx * np.arange(n)
        k = 2.0 * math.pi / self.length
        rho = self.rho_bar + self.perturbation * np.sin(k * x)
        u = self.velocity_perturbation * np.cos(k * x)
        return ClassicalField1D(rho, u, dx)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a JSON object")
        try:
            eos = EosSpec.from_dict(data["eos"])
            A = data.get("A", eos.ode_parameter)
            params = SymmetryParams(A=float(A), B=float(data.get("B", 0.0)))
            kw = {}
            for key, conv in (("cells", int), ("t_end", float), ("perturbation", float),
                              ("rho_bar", float), ("velocity_perturbation", float),
                              ("length", float), ("levels", int)):
                if key in data:
                    kw[key] = conv(data[key])
        except KeyError as exc:
            raise ConfigError(f"scenario lacks {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad scenario value: {exc}") from None
        unknown = set(data) - {"eos", "A", "B", "cells", "t_end", "perturbation", "rho_bar",
                               "velocity_perturbation", "length", "levels"}
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        sc = cls(eos=eos, params=params, **kw)
        if sc.cells < MIN_CELLS or sc.levels < 2 or sc.t_end < 0:
            raise ConfigError("scenario needs cells >= 8, levels >= 2, t_end >= 0")
        return sc

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        return cls.from_dict(data)


@dataclass
class EquivalenceResult:
    cells: list
    errors: list
    orders: list
    final: tuple = field(repr=False, default=None)

    @property
    def min_order(self):
        return min(self.orders) if self.orders else float("nan")


def transformed_difference(eos, params, classical: ClassicalField1D, symmetric: SymmetricField1D):
    """Pointwise ``|v(rho_classical) - v_symmetric|``."""
    return np.abs(np.asarray(v_of_rho(eos, params, classical.rho)) - symmetric.v)


def equivalence_study(scenario: EquivalenceScenario) -> EquivalenceResult:
    """Max-norm transformed difference at ``cells * 2**l`` and the observed orders."""
    cells, errors, final = [], [], None
    for level in range(scenario.levels):
        n = scenario.cells * 2**level
        init = scenario.initial_field(n)
        a, b = evolve_pair(init, scenario.eos, scenario.params, scenario.t_end)
        cells.append(n)
        errors.append(float(np.max(transformed_difference(scenario.eos, scenario.params, a, b))))
        final = (a, b)
    orders = []
    for e0, e1 in zip(errors, errors[1:]):
        if e0 > 0 and e1 > 0:
            orders.append(math.log2(e0 / e1))
        else:
            orders.append(float("inf") if e1 == 0 else float("nan"))
    return EquivalenceResult(cells, errors, orders, final)


def write_equivalence_csv(path, eos, params, classical, symmetric):
    v_a = np.asarray(v_of_rho(eos, params, classical.rho))
    diff = np.abs(v_a - symmetric.v)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("cell_index,x,rho_classical,v_transformed,v_symmetric,abs_diff\n")
        for i, (x, r, va, vb, d) in enumerate(zip(classical.x, classical.rho, v_a, symmetric.v, diff)):
            fh.write(f"{i},{x:.17g},{r:.17g},{va:.17g},{vb:.17g},{d:.17g}\n")
