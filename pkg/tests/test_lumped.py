import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from firesim import lumped
from firesim.lumped import (
    NonlinearSolveError, activation, implicit_step, integrate_lumped, lumped_rhs, psi, reference_solution,
    temperature_bounds, terminal_biomass_map, tipping_line, tipping_sensitivities, trajectory_errors,
)


def test_switch_and_rate(params):
    assert activation(399.999, params) == 0.0
    assert activation(400.0, params) == 1.0
    assert psi(399.0, params) == 0.0
    assert psi(400.0, params) == pytest.approx(0.05 * math.exp(-1.0))
    np.testing.assert_array_equal(activation(np.array([300.0, 500.0]), params), [0.0, 1.0])


def test_rhs_by_hand(params):
    dT, dY = lumped_rhs((470.0, 1.0), params)
    rate = 0.05 * math.exp(-400 / 470)
    assert dT == pytest.approx((-4 * 170 + rate * 40 * 4000) / 40)
    assert dY == pytest.approx(-rate)
    dT0, _ = lumped_rhs((470.0, 1.0), params, cooling=False)
    assert dT0 == pytest.approx(rate * 4000)


def test_cooling_only_steps_match_closed_forms(params):
    # below ignition the model is linear cooling; the implicit updates have closed forms
    T0, dt, b = 350.0, 0.7, params.beta()
    T, Y = implicit_step(T0, 0.8, dt, params, "euler")
    assert float(T) == pytest.approx(300 + 50 / (1 + b * dt), rel=1e-13)
    assert float(Y) == 0.8
    T, _ = implicit_step(T0, 0.8, dt, params, "midpoint")
    assert float(T) == pytest.approx(300 + 50 * (1 - b * dt / 2) / (1 + b * dt / 2), rel=1e-13)


@pytest.mark.parametrize("integrator, order", [("euler", 1.0), ("midpoint", 2.0), ("rk2", 2.0)])
def test_convergence_on_smooth_burning(params, integrator, order):
    # t in [0, 20] stays above ignition, so the solution is smooth
    ref = reference_solution((470.0, 1.0), params, 20.0)
    errs = []
    dts = (0.4, 0.2, 0.1)
    for dt in dts:
        errs.append(trajectory_errors(integrate_lumped((470.0, 1.0), 20.0, dt, integrator, params), ref)[0])
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert slope == pytest.approx(order, abs=0.15)


def test_reference_switch_time_matches_independent_solver(params):
    ref = reference_solution((470.0, 1.0), params)
    # [DERIVED] ignition switch-off time from (470 K, 1.0)
    assert ref.switch_time == pytest.approx(85.479, abs=1e-3)

    def rhs(t, y):
        r = params.A * math.exp(-params.T_ac / y[0])
        return [(-params.h * (y[0] - 300) + r * 40 * 4000 * y[1]) / 40, -r * y[1]]

    def event(t, y):
        return y[0] - 400.0

    event.terminal = True
    sol = solve_ivp(rhs, (0, 150), [470.0, 1.0], method="Radau", rtol=1e-11, atol=1e-11, events=event)
    assert ref.switch_time == pytest.approx(sol.t_events[0][0], rel=1e-7)
    # past the switch the oracle is exact exponential cooling
    T, Y = ref(np.array([100.0, 140.0]))
    Tc, Yc = ref(np.array([ref.switch_time + 1e-9]))
    np.testing.assert_allclose(T, 300 + 100 * np.exp(-0.1 * (np.array([100.0, 140.0]) - ref.switch_time)),
                               rtol=1e-12)
    np.testing.assert_allclose(Y, Yc[0], rtol=0, atol=0)


def test_reference_below_ignition_is_pure_cooling(params):
    ref = reference_solution((350.0, 0.5), params)
    T, Y = ref(np.array([0.0, 10.0]))
    np.testing.assert_allclose(T, [350.0, 300 + 50 * math.exp(-1.0)])
    np.testing.assert_array_equal(Y, [0.5, 0.5])


@settings(max_examples=60, deadline=None)
@given(T0=st.floats(300.0, 1500.0), Y0=st.floats(0.0, 1.0), dt=st.floats(0.01, 2.0),
       method=st.sampled_from(lumped.INTEGRATORS))
def test_step_respects_invariants(params, T0, Y0, dt, method):
    T, Y = implicit_step(T0, Y0, dt, params, method)
    lo, hi = temperature_bounds(params, T0)
    assert 0.0 <= float(Y) <= Y0 + 1e-15
    assert lo - 1e-9 <= float(T) <= max(hi, T0) + 1e-9


def test_trajectory_invariants(params):
    traj = integrate_lumped((470.0, 1.0), 150.0, 0.1, "rk2", params)
    assert np.all(np.diff(traj.Y) <= 0)
    assert traj.Y.min() >= 0
    lo, hi = temperature_bounds(params, 470.0)
    assert traj.T.min() >= lo and traj.T.max() <= hi
    assert traj.t[-1] == 150.0 and len(traj) == 1501


def test_uneven_final_step(params):
    traj = integrate_lumped((470.0, 1.0), 1.0, 0.3, "euler", params)
    np.testing.assert_allclose(traj.t, [0, 0.3, 0.6, 0.9, 1.0])


def test_bad_arguments(params):
    with pytest.raises(ValueError):
        integrate_lumped((470.0, 1.0), 10.0, 0.0)
    with pytest.raises(ValueError):
        integrate_lumped((470.0, 1.0), 10.0, 0.1, "rk4")
    with pytest.raises(ValueError):
        implicit_step(470.0, 1.0, -1.0, params)


def test_newton_failure_is_reported(params, monkeypatch):
    monkeypatch.setattr(lumped, "NEWTON_MAX_ITER", 0)
    monkeypatch.setattr(lumped, "MAX_HALVINGS", 1)
    with pytest.raises(NonlinearSolveError) as info:
        implicit_step(np.array([900.0, 350.0]), np.array([1.0, 1.0]), 1.0, params, "midpoint", cooling=False)
    assert info.value.residual > 0


def test_temperature_bounds(params):
    assert temperature_bounds(params) == (300.0, 40 / 4 * 0.05 * 4000 + 300)
    assert temperature_bounds(params, 250.0)[0] == 250.0
    assert temperature_bounds(params.replace(h=0.0))[1] == math.inf


def test_tipping_line_zeroes_heating(params):
    T = np.linspace(401.0, 2000.0, 9)
    dT, _ = lumped_rhs((T, tipping_line(T, params)), params)
    np.testing.assert_allclose(dT, 0.0, atol=1e-9)


@pytest.mark.parametrize("T", [350.0, 470.0, 800.0, 1500.0])
def test_tipping_sensitivities_vs_finite_differences(params, T):
    d_rho0, d_tac = tipping_sensitivities(T, params)
    for name, analytic in (("rho0", d_rho0), ("T_ac", d_tac)):
        x = getattr(params, name)
        step = 1e-5 * x
        up = tipping_line(T, params.replace(**{name: x + step}))
        down = tipping_line(T, params.replace(**{name: x - step}))
        assert analytic == pytest.approx((up - down) / (2 * step), rel=1e-6)
    with pytest.raises(ValueError):
        tipping_sensitivities(300.0, params)


def test_terminal_map(params):
    T0s, Y0s, Ystar = terminal_biomass_map((350.0, 470.0), (0.2, 1.0), (2, 5), params)
    assert Ystar.shape == (2, 5)
    # no ignition below T_pc: biomass untouched
    np.testing.assert_array_equal(Ystar[0], Y0s)
    burnt = Ystar[1]
    assert np.all(burnt < Y0s)
    # terminal biomass barely depends on the initial biomass
    assert burnt.max() - burnt.min() < 0.1
    with pytest.raises(ValueError):
        terminal_biomass_map((350, 470), (0.2, 1.0), 3, params.replace(h=0.0))


@settings(max_examples=30, deadline=None)
@given(T0=st.floats(300.0, 1500.0), Y0=st.floats(0.01, 1.0))
def test_biomass_sub_solution(params, T0, Y0):
    traj = integrate_lumped((T0, Y0), 60.0, 0.1, "rk2", params)
    assert np.all(traj.Y >= Y0 * np.exp(-params.A * traj.t) * (1 - 1e-12))


@given(Y=st.floats(0.0, 1.0))
def test_ambient_line_is_stationary(params, Y):
    dT, dY = lumped_rhs((params.T_inf, Y), params)
    assert dT == 0.0 and dY == 0.0


@settings(max_examples=60)
@given(T=st.floats(401.0, 3000.0), Y=st.floats(0.0, 1.0))
def test_heating_classified_by_tipping_line(params, T, Y):
    dT, _ = lumped_rhs((T, Y), params)
    Ytip = tipping_line(T, params)
    if abs(Y - Ytip) > 1e-9:
        assert np.sign(dT) == np.sign(Y - Ytip)


@settings(max_examples=60)
@given(T=st.floats(1.0, 1e5))
def test_rate_bounded_by_prefactor(params, T):
    assert 0.0 <= psi(T, params) <= params.A


def test_tipping_values(params):
    # [DERIVED] direct evaluation and analytic differentiation at T = 470 K; the
    # frozen reference figures carry a 1.3e-5 relative rounding offset
    exact = 4 * 170 / (40 * 4000 * 0.05) * math.exp(400 / 470)
    assert tipping_line(470.0, params) == pytest.approx(exact, rel=1e-12)
    assert tipping_line(470.0, params) == pytest.approx(0.199079, rel=5e-5)
    assert tipping_line(300.0, params) == 0.0
    assert tipping_line(470.0, params.replace(rho0=80.0)) == pytest.approx(0.5 * tipping_line(470.0, params))
    d_rho0, d_tac = tipping_sensitivities(470.0, params)
    assert d_rho0 == pytest.approx(-exact / 40, rel=1e-12)
    assert d_tac == pytest.approx(exact / 470, rel=1e-12)
    assert d_rho0 == pytest.approx(-4.97698e-3, rel=5e-5)
    assert d_tac == pytest.approx(4.23573e-4, rel=5e-5)


def test_bound_values(params):
    # [DERIVED] defaults give 40 / 4 * 0.05 * 4000 + 300
    assert temperature_bounds(params)[1] == pytest.approx(2300.0)
    assert temperature_bounds(params.replace(A=0.0))[1] == 300.0


def test_peak_temperature_on_tipping_line(params):
    traj = integrate_lumped((470.0, 1.0), 150.0, 0.01, "rk2", params)
    i = int(np.argmax(traj.T))
    gap = traj.Y - tipping_line(traj.T, params)
    crossing = int(np.flatnonzero(np.diff(np.sign(gap[:i + 50])) != 0)[0])
    assert abs(crossing - i) <= 1


def test_cold_and_empty_states(params):
    traj = integrate_lumped((350.0, 0.8), 150.0, 0.5, "rk2", params)
    assert np.all(traj.Y == 0.8)
    cool = integrate_lumped((350.0, 1.0), 60.0, 0.5, "rk2", params.replace(A=0.0))
    assert np.all(np.diff(cool.T) < 0) and cool.T[-1] > 300.0
    burnt = integrate_lumped((470.0, 0.2), 150.0, 0.01, "rk2", params)
    assert abs(burnt.T[-1] - 300.0) < 1.0 and np.all(np.diff(burnt.Y) <= 0)
    _, _, Ystar = terminal_biomass_map((470.0, 470.0), (0.0, 0.0), (1, 1), params)
    assert Ystar[0, 0] == 0.0
