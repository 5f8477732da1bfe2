"""Small numerical kernels: periodic differences and safeguarded Newton."""

from __future__ import annotations

import math

import numpy as np

from .errors import RootNotBracketed


def ddx4(f, dx):
    """Fourth-order central first derivative on a periodic grid."""
    # grouped as differences so constant fields give exactly zero
    return (
        8.0 * (np.roll(f, -1) - np.roll(f, 1)) - (np.roll(f, -2) - np.roll(f, 2))
    ) / (12.0 * dx)


def ddx2(f, dx, axis=-1):
    """Second-order central first derivative on a periodic grid."""
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * dx)


def newton_bisect(f, fprime, lo, hi, *, flo=None, fhi=None, x0=None, rtol=1e-15, maxiter=100):
    """Root of a monotone scalar function on ``[lo, hi]``.

    Newton steps are accepted only when they stay strictly inside the
    current bracket and shrink it; otherwise the bracket is bisected
    (geometrically when it spans more than a decade and ``lo > 0``).
    Returns ``(root, iterations)``.
    """
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0:
        return lo, 0
    if fhi == 0:
        return hi, 0
    if np.sign(flo) == np.sign(fhi):
        raise RootNotBracketed(f"no sign change on [{lo:.17g}, {hi:.17g}]")
    increasing = fhi > 0
    x = 0.5 * (lo + hi) if x0 is None or not lo < x0 < hi else float(x0)
    for it in range(1, maxiter + 1):
        fx = f(x)
        if fx == 0:
            return x, it
        if (fx > 0) == increasing:
            hi = x
        else:
            lo = x
        d = fprime(x)
        step = fx / d if d != 0 and math.isfinite(d) else math.inf
        xn = x - step
        if not lo < xn < hi or abs(step) > 0.5 * (hi - lo):
            if lo > 0 and hi > 10.0 * lo:
                xn = math.sqrt(lo * hi)
            else:
                xn = 0.5 * (lo + hi)
        if abs(xn - x) <= rtol * abs(xn) or hi - lo <= rtol * abs(hi):
            return xn, it
        x = xn
    return x, maxiter
