"""Logarithmic equation of state Euler framework.

Barotropic EOS family, the classical symmetrizing map, the relativistic
symmetric hyperbolic reformulation and a 1D relativistic Euler solver.
"""

from .classical import (
    ClassicalField1D,
    EquivalenceScenario,
    SymmetricField1D,
    SymmetryParams,
    equivalence_study,
    evolve_pair,
    rho_of_v,
    v_of_rho,
)
from .eos import (
    AdmissibleWindow,
    EosSpec,
    Family,
    d2p_drho2,
    dp_drho,
    lemma1_bounds,
    ode_residual,
    pressure,
    subluminal_check,
)
from .errors import *  # noqa: F401,F403
from .estimators import ConservedTransformer, RelativisticSymmetrizer, SoundSpeedTransformer
from .hydro import HydroScenario, SolverConfig, cons_to_prim, prim_to_cons, run
from .symmetrizer import (
    PhiTable,
    PrimState,
    SymState,
    assemble_A0,
    assemble_Ak,
    check_A0_spd,
    coeffs,
    from_sym,
    jacobian_det,
    jacobian_w,
    select_ak_variant,
    to_sym,
)

__version__ = "0.1.0"
