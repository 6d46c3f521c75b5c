import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from firesim.grid import Grid
from firesim.params import ConfigError
from firesim.scenarios import (
    build_scenario, exact_adv_diff, gaussian_profile, ic_disc_2d, ic_gaussian_1d, ic_slab_1d, initial_state,
    multiscale_biomass, scenario_names,
)


def test_disc_ic():
    g = Grid(((0.0, 1000.0), (0.0, 1000.0)), (100, 100))
    T = ic_disc_2d(g, (500.0, 500.0), 50.0, 400.0, 300.0)
    assert set(np.unique(T)) == {300.0, 400.0}
    X, Y = g.mesh()
    np.testing.assert_array_equal(T == 400.0, np.hypot(X - 500, Y - 500) < 50)
    # a disc between cell centres covers nothing
    tiny = ic_disc_2d(g, (500.0, 500.0), 1.0, 470.0, 300.0)
    assert np.all(tiny == 300.0)
    with pytest.raises(ValueError):
        ic_disc_2d(g, (0, 0), 0.0, 400, 300)


def test_slab_ic():
    g = Grid(((0.0, 500.0),), (2000,))
    s = ic_slab_1d(g, (225.0, 275.0))
    x = g.centers()
    np.testing.assert_array_equal(s.T == 470.0, (x > 225) & (x < 275))
    assert np.all(s.Y == 1.0) and (s.T == 470.0).sum() == 200
    assert np.all(ic_slab_1d(g, (250.0, 250.0)).T == 300.0)
    with pytest.raises(ValueError):
        ic_slab_1d(g, (-1.0, 10.0))


def test_slab_ic_resolution_consistent():
    # refining only changes which centres are sampled
    coarse = Grid(((0.0, 500.0),), (500,))
    fine = Grid(((0.0, 500.0),), (2000,))
    Tc = ic_slab_1d(coarse, (225.0, 275.0)).T
    Tf = ic_slab_1d(fine, (225.0, 275.0)).T
    xf = fine.centers()
    np.testing.assert_array_equal(np.interp(coarse.centers(), xf, Tf) == 470.0, Tc == 470.0)


def test_gaussian_profile():
    assert gaussian_profile(250.0, 250.0) == 400.0
    assert gaussian_profile(1e4, 250.0) == pytest.approx(300.0)
    # [DERIVED] half-height at sqrt(1000 ln 2)
    half = math.sqrt(1000 * math.log(2))
    assert half == pytest.approx(26.3277, abs=1e-4)
    np.testing.assert_allclose(gaussian_profile([250 - half, 250 + half], 250.0), 350.0, rtol=1e-13)
    g = Grid(((0.0, 1000.0),), (100,))
    np.testing.assert_array_equal(ic_gaussian_1d(g, 250.0), gaussian_profile(g.centers(), 250.0))


def test_exact_solution():
    p = build_scenario("verify-advdiff").params
    x = np.linspace(0, 1000, 101)
    np.testing.assert_array_equal(exact_adv_diff(x, 0.0, 250.0, p), gaussian_profile(x, 250.0))
    # [DERIVED] 300 + 100 / sqrt(5) * exp(-1)
    assert exact_adv_diff(750.0, 100.0, 250.0, p, period=1000.0) == pytest.approx(316.452, abs=1e-3)
    assert exact_adv_diff(750.0, 100.0, 250.0, p.replace(h=1e3)) == 300.0


def test_landscape_deterministic_and_bounded():
    g = Grid(((0.0, 200.0), (0.0, 100.0)), (100, 50))
    a = multiscale_biomass(g, seed=7)
    b = multiscale_biomass(g, seed=7)
    np.testing.assert_array_equal(a.Y, b.Y)
    assert not np.array_equal(a.Y, multiscale_biomass(g, seed=8).Y)
    assert a.Y.min() >= 0 and a.Y.max() <= 1 and len(a.layers) == 4
    full = multiscale_biomass(g, seed=7, magnitudes="max")
    np.testing.assert_allclose(full.Y, 1.0)
    with pytest.raises(ValueError):
        multiscale_biomass(g, layer_max=0.3)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_landscape_layers_piecewise_constant(seed):
    g = Grid(((0.0, 100.0), (0.0, 100.0)), (50, 50))
    land = multiscale_biomass(g, seed=seed)
    np.testing.assert_allclose(sum(land.layers), land.Y, atol=1e-15)
    # the coarsest layer has patches at least 50 m wide: few distinct values per row
    assert len(np.unique(land.layers[-1][:, 0])) <= 3
    assert land.Y.min() >= 0 and land.Y.max() <= 1


def test_landscape_histogram_spread():
    g = Grid(((0.0, 500.0), (0.0, 500.0)), (500, 500))
    Y = multiscale_biomass(g, seed=0).Y
    counts, _ = np.histogram(Y, bins=10, range=(0, 1))
    assert np.count_nonzero(counts) >= 10


def test_named_scenarios_build_and_validate():
    names = scenario_names()
    assert len(names) == 5 + 7 + 6 + 7
    for name in names:
        sc = build_scenario(name)
        g = sc.grid()
        s = initial_state(sc, g)
        assert s.T.shape == g.shape
        s.check()
    with pytest.raises(KeyError):
        build_scenario("caseA-9")
    with pytest.raises(KeyError):
        build_scenario("nope")


def test_table_rows():
    a6 = build_scenario("caseA-6")
    assert a6.run.domain == ((0.0, 500.0),) and a6.run.t_final == 800.0 and a6.run.cells == (2000,)
    assert (a6.run.cfl, a6.run.weno_order, a6.run.bc, a6.params.h) == (0.1, 7, "transmissive", 4.0)
    het = build_scenario("heterogeneous-2d")
    assert het.run.domain == ((0.0, 500.0), (0.0, 500.0)) and het.run.t_final == 500.0
    assert het.params.k == 3.0 and het.params.v == (0.5, 0.5) and het.run.cells == (500, 500)
    adv = build_scenario("verify-advdiff")
    assert adv.run.domain == ((0.0, 1000.0),) and adv.run.t_final == 100.0 and adv.run.bc == "periodic"
    p = adv.params
    assert (p.v, p.rho0, p.C, p.k, p.h, adv.run.cells) == ((5.0,), 1.0, 1.0, 10.0, 0.01, (100,))
    assert build_scenario("caseB-3").params.h == 1.0 and build_scenario("caseB-3").params.k == 0.5
    assert build_scenario("caseC-5").params.v == (0.08,)


def test_invalid_overrides_still_validated():
    with pytest.raises(ConfigError):
        build_scenario("caseA-6").params.replace(T_pc=200.0)
