"""Default tolerances and thresholds for the verification suites.

``TOLERANCES`` are error bounds and scale with ``--tol-scale``; ``THRESHOLDS``
are minimum observed convergence orders and do not.
"""

from __future__ import annotations

TOLERANCES = {
    "ode_residual": 1e-12,     # |A p'/p'' - rho| / rho
    "dp_fd": 1e-7,             # p' against central differences of p
    "d2p_fd": 1e-7,            # p'' against central differences of p'
    "eig_rel": 1e-10,          # closed-form vs numeric Schur eigenvalues
    "jacobian_fd": 1e-6,       # max entry of J - J_fd over max |J|
    "det_rel": 1e-10,          # closed-form vs numeric Jacobian determinant
    "roundtrip": 1e-9,         # from_sym(to_sym(s)) against s
    "invariants": 1e-12,       # |v|^2 and Phi recovered from w
    "conservation": 1e-12,     # relative drift of sum D dx, sum S dx per 1000 steps
}

THRESHOLDS = {
    "equivalence_order": 1.8,
    "smooth_order": 1.8,
    "reference_order": 0.8,
}

DEFAULT_SAMPLES = 1000
DEFAULT_SEED = 0


def scaled(scale=1.0):
    """Copy of :data:`TOLERANCES` multiplied by ``scale``."""
    if not scale > 0:
        raise ValueError("tolerance scale must be positive")
    return {k: v * scale for k, v in TOLERANCES.items()}
