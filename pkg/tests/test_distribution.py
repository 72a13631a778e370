import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import airy

from qwf import distribution as dist
from qwf.evolution import evolve_spectral
from qwf.fronts import find_fronts
from qwf.lattice import HoppingConfig, group_velocity

AREA_LIMIT = [0.9468, 0.9086, 0.9155, 0.9220, 0.9270]


@given(st.floats(0.0, 1.0), st.floats(1.0, 300.0))
@settings(max_examples=30, deadline=None)
def test_cumulative_properties(g, t):
    prof = dist.cumulative(evolve_spectral(HoppingConfig.from_g(g), t))
    assert np.all(np.diff(prof.Phi) >= -1e-15)
    assert prof.Phi[-1] == pytest.approx(1.0, abs=1e-12)
    n = np.arange(-50, 51)
    # midpoint form is antisymmetric about the origin
    assert np.max(np.abs(prof.at(n, True) + prof.at(-n, True) - 1.0)) < 1e-12
    # inclusive form: Phi(-n-1) = 1 - Phi(n)
    assert np.max(np.abs(prof.at(-n - 1) - (1.0 - prof.at(n)))) < 1e-12


def test_global_curve_nearest_neighbour_closed_form():
    config = HoppingConfig.from_g(0.0)
    u = np.linspace(-1.99, 1.99, 41)
    assert np.max(np.abs(dist.global_scaling_curve(config, u) - (0.5 + np.arcsin(u / 2) / np.pi))) < 1e-12


@given(st.floats(0.0, 1.5), st.floats(-1.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_global_curve_is_zone_fraction(g, frac):
    config = HoppingConfig.from_g(g)
    u = frac * find_fronts(config).v_e
    q = -np.pi + 2 * np.pi * (np.arange(1 << 18) + 0.5) / (1 << 18)
    brute = np.mean(group_velocity(config, q) <= u)
    assert dist.global_scaling_curve(config, u) == pytest.approx(brute, abs=2e-5)


def test_global_curve_limits_and_guard():
    config = HoppingConfig.from_g(0.5)
    v_e = find_fronts(config).v_e
    vals = dist.global_scaling_curve(config, np.linspace(-1.1 * v_e, 1.1 * v_e, 301))
    assert vals[0] == 0.0 and vals[-1] == 1.0 and np.all(np.diff(vals) >= 0)
    with pytest.raises(ValueError):
        dist.global_scaling_curve(config, 2 * v_e)


def test_collapse_at_moderate_times():
    rep = dist.scaling_collapse_test(HoppingConfig.from_g(0.125), [500, 1000])
    assert rep.max_theory < 1e-2 and rep.max_pairwise < 1e-2 and len(rep.per_time) == 2


@pytest.mark.parametrize("x", [0.5, 2.338, 5.0, 9.0])
def test_airy_square_integral(x):
    ref = quad(lambda y: airy(-y)[0] ** 2, 0, x, epsabs=1e-14)[0]
    assert dist.airy_square_integral(x) == pytest.approx(ref, abs=1e-12)


@given(st.floats(0.05, 20.0))
@settings(max_examples=20, deadline=None)
def test_predicted_areas_do_not_depend_on_alpha(alpha):
    h, w = dist.staircase_predictions(alpha, 5)
    assert np.allclose(h * w, AREA_LIMIT, atol=1e-4)
    assert np.all(np.diff(h) > 0) and np.all(np.diff(w) < 0)


def test_staircase_on_nearest_neighbour_walk():
    config = HoppingConfig.from_g(0.0)
    rep = dist.staircase_extract(evolve_spectral(config, 5000.0), find_fronts(config).front("right"), 5, config)
    assert rep.complete and rep.count == 5
    assert rep.alpha_local == pytest.approx(1.0)
    assert np.allclose(rep.column("area"), rep.column("area_pred"), atol=0.02)
    assert np.allclose(rep.column("h_s"), rep.column("h_pred"), rtol=0.03)
    assert np.allclose(rep.column("w_s"), rep.column("w_pred"), rtol=0.03)


def test_staircase_left_front_mirrors_right():
    config = HoppingConfig.from_g(0.125)
    state = evolve_spectral(config, 3000.0)
    fs = find_fronts(config)
    right = dist.staircase_extract(state, fs.front("right"), 4, config)
    left = dist.staircase_extract(state, fs.front("left"), 4, config)
    assert np.allclose(right.column("area"), left.column("area"), atol=1e-6)


def test_gaussian_smooth():
    y = np.full(50, 3.0)
    assert np.allclose(dist.gaussian_smooth(y, 2.0), 3.0)
    x = np.arange(10.0)
    assert np.array_equal(dist.gaussian_smooth(x, 0.0), x)


def test_front_component_keeps_plane_wave():
    config = HoppingConfig.from_g(0.0)
    state = evolve_spectral(config, 200.0)
    front = find_fronts(config).front("right")
    sites, amps = dist.front_component(state, front, band=3.2)
    assert np.allclose(amps, state.psi(sites), atol=1e-12)


def test_critical_profile_properties():
    prof = dist.critical_front_profile(2000.0)
    assert prof.antisymmetry < 1e-10
    assert prof.stationary_inflexions == () or len(prof.stationary_inflexions) == 0
    assert prof.slope > 0
    assert dist.critical_collapse([prof, prof]) == 0.0
