import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logeuler import hydro
from logeuler.eos import EosSpec, lemma1_bounds, pressure
from logeuler.errors import (
    AssumptionViolation,
    CflViolation,
    ConfigError,
    InadmissibleTarget,
    RecoveryFailure,
    SuperluminalState,
)

LOG = EosSpec.logarithmic(1.0)
HEAVY = EosSpec.logarithmic(2.0, K=0.5, c=1.3)


def admissible_sample(eos, n, rng):
    win = lemma1_bounds(eos)
    rho = np.exp(rng.uniform(math.log(win.rho_min), math.log(win.rho_max), n))
    v = eos.c * math.sqrt(1 - win.velocity_margin) * rng.uniform(-0.999, 0.999, n)
    return rho, v


# --- pointwise maps ----------------------------------------------------------------

def test_rest_state_conserved_variables():
    D, S = hydro.prim_to_cons(LOG, 3.0, 0.0)
    assert D == pytest.approx(3.0, rel=1e-15) and S == 0.0
    assert hydro.cons_to_prim(LOG, 3.0, 0.0) == pytest.approx((3.0, 0.0), rel=1e-12)


def test_round_trip_example():
    D, S = hydro.prim_to_cons(LOG, 2.0, 0.5)
    # h = 2 + ln 2, D = h / 0.75 - ln 2, S = 0.5 h / 0.75
    assert D == pytest.approx((2 + math.log(2)) / 0.75 - math.log(2), rel=1e-15)
    assert S == pytest.approx(0.5 * (2 + math.log(2)) / 0.75, rel=1e-15)
    rho, v = hydro.cons_to_prim(LOG, D, S)
    assert rho == pytest.approx(2.0, rel=1e-10) and v == pytest.approx(0.5, rel=1e-10)


def test_D_grows_toward_the_light_cone():
    v = 1 - np.logspace(-1, -8, 30)
    D, _ = hydro.prim_to_cons(LOG, 2.0, v)
    assert np.all(np.diff(D) > 0) and D[-1] > 1e7
    D, _ = hydro.prim_to_cons(LOG, 2.0, -v)
    assert np.all(np.diff(D) > 0)


@pytest.mark.parametrize("eos", [LOG, HEAVY], ids=["unit", "heavy"])
def test_round_trip_random(eos, rng):
    rho, v = admissible_sample(eos, 1000, rng)
    D, S = hydro.prim_to_cons(eos, rho, v)
    r2, v2 = hydro.cons_to_prim(eos, D, S)
    assert np.max(np.abs(r2 - rho) / rho) <= 1e-10
    assert np.max(np.abs(v2 - v)) <= 1e-10 * eos.c


def test_round_trip_with_guess(rng):
    rho, v = admissible_sample(LOG, 200, rng)
    D, S = hydro.prim_to_cons(LOG, rho, v)
    r2, _ = hydro.cons_to_prim(LOG, D, S, rho_guess=rho * (1 + 1e-3))
    assert np.max(np.abs(r2 - rho) / rho) <= 1e-10


def test_recovery_failure_below_admissible_range():
    D, S = hydro.prim_to_cons(LOG, 2.0, 0.5)
    with pytest.raises(RecoveryFailure) as exc:
        hydro.cons_to_prim(LOG, 0.5 * D, S)
    assert exc.value.index == 0
    with pytest.raises(RecoveryFailure):
        hydro.cons_to_prim(LOG, np.array([3.0, 0.5]), np.array([0.0, 0.0]))


def test_recovery_clamp():
    rho, v = hydro.cons_to_prim(LOG, np.array([3.0, 0.5]), np.array([0.0, 0.0]), clamp=True)
    assert rho[0] == pytest.approx(3.0) and rho[1] == pytest.approx(lemma1_bounds(LOG).rho_min)


def test_flux_identities(rng):
    assert hydro.flux(LOG, 3.0, 0.0) == (0.0, pytest.approx(math.log(3.0)))
    rho, v = admissible_sample(LOG, 100, rng)
    fd, fs = hydro.flux(LOG, rho, v)
    _, S = hydro.prim_to_cons(LOG, rho, v)
    np.testing.assert_array_equal(fd, S)
    np.testing.assert_allclose(fs, S * v + pressure(LOG, rho), rtol=1e-15)


def test_superluminal_rejected():
    with pytest.raises(SuperluminalState):
        hydro.prim_to_cons(LOG, 2.0, 1.0)
    with pytest.raises(SuperluminalState):
        hydro.flux(LOG, 2.0, -1.2)
    with pytest.raises(SuperluminalState):
        hydro.wave_speeds(LOG, 2.0, 0.0, 2.0, 1.0)


def _flux_jacobian(eos, rho, v, h=1e-7):
    D, S = hydro.prim_to_cons(eos, rho, v)

    def F(d, s):
        return np.array(hydro.flux(eos, *hydro.cons_to_prim(eos, d, s)))

    cols = []
    for e in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        step = h * max(abs(D), abs(S), 1.0)
        cols.append((F(D + step * e[0], S + step * e[1]) - F(D - step * e[0], S - step * e[1])) / (2 * step))
    return np.column_stack(cols)


@pytest.mark.parametrize("rho, v", [(2.0, 0.0), (2.0, 0.5), (5.0, -0.7), (1.5, 0.9), (30.0, 0.2)])
def test_flux_jacobian_eigenvalues_are_characteristic_speeds(rho, v):
    eig = np.sort(np.linalg.eigvals(_flux_jacobian(LOG, rho, v)).real)
    lm, lp = hydro.char_speeds(LOG, rho, v)
    np.testing.assert_allclose(eig, [lm, lp], atol=1e-5)
    smin, smax = hydro.wave_speeds(LOG, rho, v, rho, v)
    assert smin <= eig[0] + 1e-5 and eig[1] <= smax + 1e-5


def test_wave_speed_at_rest():
    # p' = 1/rho = 0.25 at rho = 4
    assert hydro.wave_speeds(LOG, 4.0, 0.0, 4.0, 0.0) == pytest.approx((-0.5, 0.5), rel=1e-15)


@pytest.mark.parametrize("eos", [LOG, HEAVY], ids=["unit", "heavy"])
def test_wave_speeds_subluminal(eos, rng):
    rl, vl = admissible_sample(eos, 1000, rng)
    rr, vr = admissible_sample(eos, 1000, rng)
    smin, smax = hydro.wave_speeds(eos, rl, vl, rr, vr)
    assert np.all(np.abs(smin) < eos.c) and np.all(np.abs(smax) < eos.c)
    assert np.all(smin <= smax)


@given(rho=st.floats(1.0 + 1e-6, 1e3), v=st.floats(-0.999, 0.999))
def test_characteristic_speeds_bracket_fluid_velocity(rho, v):
    lm, lp = hydro.char_speeds(LOG, rho, v)
    assert -1 < lm <= v <= lp < 1


# --- scheme --------------------------------------------------------------------------

@pytest.mark.parametrize("limiter", ["none", "minmod"])
@pytest.mark.parametrize("riemann", ["hll", "rusanov"])
@pytest.mark.parametrize("bc", ["periodic", "outflow"])
def test_uniform_state_is_stationary(limiter, riemann, bc):
    D, S = hydro.prim_to_cons(LOG, np.full(16, 2.0), np.full(16, 0.3))
    g = hydro.Grid1D.from_interior(D, S, 1 / 16, bc)
    cfg = hydro.SolverConfig(LOG, limiter=limiter, riemann=riemann)
    g2 = hydro.step(g, cfg)
    np.testing.assert_allclose(g2.interior, g.interior, rtol=1e-15, atol=0)


def test_step_rejects_large_dt():
    sc = hydro.HydroScenario.from_dict({"eos": LOG.to_dict(), "cells": 32})
    g = sc.initial_grid()
    with pytest.raises(CflViolation):
        hydro.step(g, sc.config(), dt=g.dx)


def test_conservation_over_1000_steps():
    sc = hydro.HydroScenario.from_dict({
        "eos": LOG.to_dict(), "cells": 64, "steps": 1000, "bc": "periodic",
        "init": {"type": "smooth_wave"},
    })
    res = hydro.run(sc)
    assert res.steps == 1000
    assert res.drift_D <= 1e-12 and res.drift_S <= 1e-12


@pytest.mark.parametrize("riemann", ["hll", "rusanov"])
def test_riemann_problem_stays_admissible(riemann):
    sc = hydro.HydroScenario.from_dict({
        "eos": LOG.to_dict(), "cells": 128, "bc": "outflow", "t_end": 0.2, "riemann": riemann,
        "init": {"type": "riemann"}, "outputs": 4,
    })
    res = hydro.run(sc)
    assert len(res.snapshots) == 5
    assert [s.t for s in res.snapshots] == pytest.approx([0.0, 0.05, 0.1, 0.15, 0.2])
    for snap in res.snapshots:
        assert np.all(snap.rho >= 1.0) and np.all(np.abs(snap.v) < 1.0)
    # the left state pushes matter right
    assert res.snapshots[-1].v.max() > 0.05


def test_smooth_wave_cell_averages():
    sc = hydro.HydroScenario.from_dict({"eos": LOG.to_dict(), "cells": 64})
    D, S = sc.initial_grid().interior
    # periodic trapezoid on a fine grid is spectrally accurate
    x = (np.arange(4096) + 0.25) / 4096
    Df, Sf = hydro.prim_to_cons(LOG, *sc.primitive_profile(x))
    assert math.fsum(D) / 64 == pytest.approx(Df.mean(), rel=1e-12)
    assert math.fsum(S) / 64 == pytest.approx(Sf.mean(), rel=1e-10, abs=1e-14)


def test_initial_data_margins():
    bad = {"eos": LOG.to_dict(), "cells": 32, "init": {"type": "riemann", "rho_right": 0.9}}
    with pytest.raises(AssumptionViolation):
        hydro.run(hydro.HydroScenario.from_dict(bad))
    fast = {"eos": LOG.to_dict(), "cells": 32, "init": {"type": "smooth_wave", "v0": 0.9999999, "v_amp": 0.0}}
    with pytest.raises(AssumptionViolation):
        hydro.run(hydro.HydroScenario.from_dict(fast))


def test_admissibility_monitor():
    with pytest.raises(InadmissibleTarget):
        hydro._check_admissible(LOG, np.array([2.0, 0.99]), np.array([0.0, 0.0]), 0.1)


def test_snapshot_csv(tmp_path):
    sc = hydro.HydroScenario.from_dict({"eos": LOG.to_dict(), "cells": 16, "t_end": 0.01})
    res = hydro.run(sc)
    path = tmp_path / "s.csv"
    hydro.write_snapshots(path, res.snapshots)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,rho,v,p,D,S"
    assert len(lines) == 1 + 16 * len(res.snapshots)


def test_restrict():
    np.testing.assert_array_equal(hydro.restrict(np.arange(8.0), 4), [1.5, 5.5])


@pytest.mark.parametrize("data", [
    [],
    {"cells": 32},
    {"eos": {"family": "Polytropic", "A": 2.0}, "cells": 32},
    {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 32, "bc": "reflect"},
    {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 32, "cfl": 1.5},
    {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 32, "init": {"type": "blast"}},
    {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 32, "riemann": "roe"},
    {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 32, "colour": "red"},
    {"eos": {"family": "Logarithmic", "A": 1.0}, "cells": 1},
])
def test_scenario_errors(data):
    with pytest.raises(ConfigError):
        hydro.HydroScenario.from_dict(data)


def test_small_convergence_study():
    sc = hydro.HydroScenario.from_dict({
        "eos": LOG.to_dict(), "cells": 32, "limiter": "none", "t_end": 0.1,
    })
    errors, orders = hydro.smooth_convergence(sc, (32, 64, 128))
    assert errors[0] > errors[1] and orders[0] > 1.5
