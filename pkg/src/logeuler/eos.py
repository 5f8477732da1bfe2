"""Barotropic pressure laws of the form ``p'(rho) = K1 * rho**A``.

Integrating the power law gives the family

    p = K1 / (A + 1) * rho**(A + 1) + K     (A != -1)
    p = K1 * ln(rho) + K                    (A == -1)

which is exactly the set of laws satisfying ``A p' / p'' = rho``.  The
logarithmic law is therefore the ``A = -1`` member.  For the logarithmic
family the coefficient of ``ln(rho)`` is also called ``A`` in the
relativistic setting (``p = A ln rho``), so ``EosSpec.A`` and
``EosSpec.K1`` coincide there and :attr:`EosSpec.ode_parameter` is -1.

``LinearPlusCubic`` (``p = K1 (rho + rho**3) + K``) is not a family member;
it is kept as the falsification case for the symmetrization tests.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import AssumptionViolation, ConfigError, NonpositiveDensity, ZeroCurvature


class Family(str, enum.Enum):
    POLYTROPIC = "Polytropic"
    CHAPLYGIN = "Chaplygin"
    LOGARITHMIC = "Logarithmic"
    GENERAL_POWER = "GeneralPower"
    LINEAR_PLUS_CUBIC = "LinearPlusCubic"


_JSON_FIELDS = ("family", "A", "K1", "K", "c")


@dataclass(frozen=True)
class EosSpec:
    """Parameters of one barotropic pressure law.

    Parameters
    ----------
    family : Family
    A : float
        Exponent of the sound-speed power law (power families), the
        coefficient of ``ln rho`` (logarithmic family), or the coupling
        constant used with a non-member law.
    K1 : float
        Pressure scale, > 0.
    K : float
        Additive pressure constant.
    c : float
        Light speed, > 0.
    """

    family: Family
    A: float
    K1: float = 1.0
    K: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ConfigError(f"unknown EOS family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        for name in ("A", "K1", "K", "c"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise ConfigError(f"EOS field {name!r} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(f"EOS field {name!r} must be finite")
            object.__setattr__(self, name, float(value))
        if self.K1 <= 0:
            raise ConfigError("K1 must be positive")
        if self.c <= 0:
            raise ConfigError("c must be positive")
        A = self.A
        if fam is Family.POLYTROPIC and not A > 0:
            raise ConfigError(f"Polytropic law needs A > 0, got {A}")
        if fam is Family.CHAPLYGIN and not -2.0 <= A < -1.0:
            raise ConfigError(f"Chaplygin law needs -2 <= A < -1, got {A}")
        if fam is Family.GENERAL_POWER and (A == 0.0 or A == -1.0):
            raise ConfigError("GeneralPower law needs A not in {0, -1}")
        if fam is Family.LOGARITHMIC:
            if not A > 0:
                raise ConfigError(f"logarithmic law needs A > 0, got {A}")
            if A != self.K1:
                raise ConfigError("logarithmic law: A and K1 are the same coefficient and must agree")
        if fam is Family.LINEAR_PLUS_CUBIC and A == 0.0:
            raise ConfigError("coupling constant A must be nonzero")

    # -- constructors -----------------------------------------------------
    @classmethod
    def logarithmic(cls, A=1.0, K=0.0, c=1.0):
        return cls(Family.LOGARITHMIC, A=A, K1=A, K=K, c=c)

    @classmethod
    def polytropic(cls, A, K1=1.0, K=0.0, c=1.0):
        return cls(Family.POLYTROPIC, A=A, K1=K1, K=K, c=c)

    @classmethod
    def chaplygin(cls, A, K1=1.0, K=0.0, c=1.0):
        return cls(Family.CHAPLYGIN, A=A, K1=K1, K=K, c=c)

    # -- derived quantities ----------------------------------------------
    @property
    def ode_parameter(self) -> float:
        """Parameter ``A`` for which ``A p'/p'' = rho`` holds (or the coupling for non-members)."""
        if self.family is Family.LOGARITHMIC:
            return -1.0
        return self.A

    @property
    def is_family_member(self) -> bool:
        return self.family is not Family.LINEAR_PLUS_CUBIC

    @property
    def rho_star(self) -> float:
        """Density floor ``A / c**2`` enforced by ``p' <= c**2`` (logarithmic law only)."""
        if self.family is not Family.LOGARITHMIC:
            raise ValueError("the density floor is defined for the logarithmic law only")
        return self.K1 / self.c**2

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        return {k: d[k] for k in _JSON_FIELDS}

    @classmethod
    def from_dict(cls, data) -> "EosSpec":
        if not isinstance(data, dict):
            raise ConfigError("EOS description must be a JSON object")
        unknown = set(data) - set(_JSON_FIELDS)
        if unknown:
            raise ConfigError(f"unknown EOS fields: {sorted(unknown)}")
        if "family" not in data:
            raise ConfigError("EOS description lacks 'family'")
        kw = dict(data)
        if kw["family"] == Family.LOGARITHMIC.value:
            if "A" not in kw and "K1" not in kw:
                raise ConfigError("logarithmic law needs 'A' (or 'K1')")
            kw.setdefault("A", kw.get("K1"))
            kw.setdefault("K1", kw["A"])
        elif "A" not in kw:
            raise ConfigError("EOS description lacks 'A'")
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EosSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "EosSpec":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read EOS file {path}: {exc}") from None
        return cls.from_json(text)


@dataclass(frozen=True)
class AdmissibleWindow:
    """Density interval ``[rho_star + delta, rho_max]`` used for sampling and root brackets.

    ``velocity_margin`` is the dimensionless margin in ``|v|**2 <= (1 - margin) c**2``.
    """

    rho_star: float
    rho_max: float
    delta: float
    velocity_margin: float = 1e-6
    enthalpy_floor: float = field(default=float("nan"))

    def __post_init__(self):
        if not self.rho_star > 0:
            raise ValueError("rho_star must be positive")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.rho_max > self.rho_star + self.delta:
            raise ValueError("rho_max must exceed rho_star + delta")
        if not 0 < self.velocity_margin < 1:
            raise ValueError("velocity_margin must lie in (0, 1)")

    @property
    def rho_min(self) -> float:
        return self.rho_star + self.delta


def _density(rho):
    r = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r <= 0):
        bad = r[~(np.isfinite(r) & (r > 0))] if r.ndim else r
        raise NonpositiveDensity(f"density must be positive and finite, got {float(np.ravel(bad)[0])!r}")
    return r


def pressure(eos: EosSpec, rho):
    r = _density(rho)
    if eos.family is Family.LOGARITHMIC:
        out = eos.K1 * np.log(r) + eos.K
    elif eos.family is Family.LINEAR_PLUS_CUBIC:
        out = eos.K1 * (r + r**3) + eos.K
    else:
        out = eos.K1 / (eos.A + 1.0) * r ** (eos.A + 1.0) + eos.K
    return out[()]


def dp_drho(eos: EosSpec, rho):
    """Squared sound speed ``p'(rho)``."""
    r = _density(rho)
    if eos.family is Family.LOGARITHMIC:
        out = eos.K1 / r
    elif eos.family is Family.LINEAR_PLUS_CUBIC:
        out = eos.K1 * (1.0 + 3.0 * r**2)
    else:
        out = eos.K1 * r**eos.A
    return out[()]


def d2p_drho2(eos: EosSpec, rho):
    r = _density(rho)
    if eos.family is Family.LOGARITHMIC:
        out = -eos.K1 / r**2
    elif eos.family is Family.LINEAR_PLUS_CUBIC:
        out = 6.0 * eos.K1 * r
    else:
        out = eos.A * eos.K1 * r ** (eos.A - 1.0)
    return out[()]


def ode_residual(eos: EosSpec, rho, a_eff=None):
    """``a_eff * p'/p'' - rho``; zero exactly when the law solves the symmetrizability ODE.

    ``a_eff`` defaults to :attr:`EosSpec.ode_parameter`.  Passing ``a_eff=1``
    for the logarithmic law gives ``-2 rho``.
    """
    a = eos.ode_parameter if a_eff is None else float(a_eff)
    curv = np.asarray(d2p_drho2(eos, rho))
    if np.any(curv == 0):
        raise ZeroCurvature("p'' vanishes; the law is neither strictly convex nor concave here")
    out = a * np.asarray(dp_drho(eos, rho)) / curv - np.asarray(rho, dtype=float)
    return out[()]


def subluminal_check(eos: EosSpec, rho):
    """True where ``0 < p'(rho) <= c**2``."""
    s = np.asarray(dp_drho(eos, rho))
    out = (s > 0) & (s <= eos.c**2)
    return out[()]


def lemma1_bounds(eos: EosSpec, *, rho_max=None, delta=None, velocity_margin=1e-6) -> AdmissibleWindow:
    """Density floor of the logarithmic law and the enthalpy-positivity certificate.

    Requires ``A > c**2 / e``; then ``rho c**2 + p > 0`` for every
    ``rho >= A / c**2`` because ``rho c**2 + p`` is increasing there and is
    positive at the floor.  Defaults: ``rho_max = 1e3 rho_star``,
    ``delta = 1e-6 rho_star``.
    """
    if eos.family is not Family.LOGARITHMIC:
        raise ValueError("lemma1_bounds applies to the logarithmic law only")
    c2 = eos.c**2
    gate = c2 / math.e
    if not eos.A > gate:
        raise AssumptionViolation(
            f"coefficient gate A > c^2/e fails: A = {eos.A:.6g}, c^2/e = {gate:.6g}"
        )
    rho_star = eos.rho_star
    floor = rho_star * c2 + float(pressure(eos, rho_star))
    if not floor > 0:
        raise AssumptionViolation(
            f"rho c^2 + p must be positive at rho_star = {rho_star:.6g}, got {floor:.6g}"
        )
    return AdmissibleWindow(
        rho_star=rho_star,
        rho_max=1e3 * rho_star if rho_max is None else float(rho_max),
        delta=1e-6 * rho_star if delta is None else float(delta),
        velocity_margin=velocity_margin,
        enthalpy_floor=floor,
    )
