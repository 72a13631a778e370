import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.special import jv

from qwf.errors import StepSizeError, WindowTooSmallError
from qwf.evolution import (auto_ring_size, evolve, evolve_bessel, evolve_many, evolve_ode, evolve_spectral,
                           margin, maximal_velocity, worker_count)
from qwf.lattice import HoppingConfig

ratios = st.floats(0.0, 1.5, allow_nan=False)
times = st.floats(0.0, 300.0, allow_nan=False)


@given(ratios, times)
@settings(max_examples=40, deadline=None)
def test_norm_and_mirror_symmetry(g, t):
    st_ = evolve_spectral(HoppingConfig.from_g(g), t)
    assert np.sum(st_.probabilities) == pytest.approx(1.0, abs=1e-12)
    # psi(-n) = psi(n) for a symmetric hopping matrix
    n = np.arange(-40, 41)
    assert np.max(np.abs(st_.psi(n) - st_.psi(-n))) < 1e-12


@given(ratios, st.floats(1.0, 200.0))
@settings(max_examples=25, deadline=None)
def test_outside_light_cone_is_negligible(g, t):
    config = HoppingConfig.from_g(g)
    st_ = evolve_spectral(config, t)
    far = np.abs(st_.sites) > maximal_velocity(config) * t + margin(t, config)
    assert np.max(st_.probabilities[far], initial=0.0) < 1e-20


@given(times)
@settings(max_examples=25, deadline=None)
def test_nearest_neighbour_closed_form(t):
    st_ = evolve_spectral(HoppingConfig((1.0,)), t)
    n = st_.sites
    exact = (1j ** (-(n % 4))) * jv(n, 2 * t)
    assert np.max(np.abs(st_.amplitudes - exact)) < 1e-11
    b = evolve_bessel(t)
    assert np.max(np.abs(b.amplitudes - (1j ** (-(b.sites % 4))) * jv(b.sites, 2 * t))) < 1e-12


def test_spectral_against_scipy_ode():
    config = HoppingConfig((1.0, 0.5, -0.2))
    N = 80
    H = np.zeros((2 * N + 1, 2 * N + 1))
    for J, g in enumerate(config.couplings, 1):
        H += g * (np.eye(2 * N + 1, k=J) + np.eye(2 * N + 1, k=-J))
    psi0 = np.zeros(2 * N + 1, complex)
    psi0[N] = 1
    sol = solve_ivp(lambda _, y: -1j * (H @ y), (0, 8.0), psi0, rtol=1e-11, atol=1e-13, method="DOP853")
    spec = evolve_spectral(config, 8.0)
    assert np.max(np.abs(spec.psi(np.arange(-N, N + 1)) - sol.y[:, -1])) < 1e-8


def test_rk4_oracle_matches_spectral():
    config = HoppingConfig.from_g(0.3)
    ode = evolve_ode(config, 10.0)
    assert np.max(np.abs(evolve_spectral(config, 10.0).psi(ode.sites) - ode.amplitudes)) < 1e-8


def test_rk4_guards():
    config = HoppingConfig.from_g(0.3)
    with pytest.raises(ValueError):
        evolve_ode(config, 10.0, half_width=10)
    with pytest.raises(StepSizeError):
        evolve_ode(config, 10.0, step=0.9)


def test_ring_size_independence():
    config = HoppingConfig.from_g(0.5)
    a = evolve_spectral(config, 40.0)
    b = evolve_spectral(config, 40.0, ring_size=4 * a.ring_size)
    n = np.arange(-200, 201)
    assert np.max(np.abs(a.psi(n) - b.psi(n))) < 1e-13


def test_small_ring_detected():
    with pytest.raises(WindowTooSmallError):
        evolve_spectral(HoppingConfig.from_g(0.5), 100.0, ring_size=256)


def test_ring_margin_covers_steep_curvature():
    # g = 1/4 has a large |w'''| and a long Airy tail
    config = HoppingConfig.from_g(0.25)
    for t in (1531.0874616820304, 3000.0):
        assert evolve_spectral(config, t).ring_size == auto_ring_size(config, t)


@pytest.mark.parametrize("bad", [-1.0, float("nan"), float("inf")])
def test_bad_time(bad):
    with pytest.raises(ValueError):
        evolve_spectral(HoppingConfig.from_g(0.1), bad)


def test_time_zero_is_delta():
    st_ = evolve_spectral(HoppingConfig.from_g(0.2), 0.0)
    assert st_.p(0) == pytest.approx(1.0) and np.sum(st_.probabilities) == pytest.approx(1.0)


def test_state_helpers():
    st_ = evolve_spectral(HoppingConfig.from_g(0.2), 5.0)
    sub = st_.restrict(-10, 10)
    assert sub.n_min == -10 and sub.n_max == 10
    assert np.array_equal(sub.psi([-3, 4]), st_.psi([-3, 4]))
    with pytest.raises(IndexError):
        sub.p(11)
    with pytest.raises(ValueError):
        st_.amplitudes[0] = 0


def test_evolve_dispatch():
    nn = HoppingConfig((1.0,))
    assert evolve(nn, 3.0, "bessel").method == "bessel"
    with pytest.raises(ValueError):
        evolve(HoppingConfig.from_g(0.1), 3.0, "bessel")
    with pytest.raises(ValueError):
        evolve(nn, 3.0, "leapfrog")


def test_thread_count_does_not_change_results(monkeypatch):
    jobs = [(HoppingConfig.from_g(g), 30.0 + g) for g in (0.0, 0.1, 0.25, 0.5)]
    monkeypatch.setenv("QWF_THREADS", "1")
    assert worker_count() == 1
    one = evolve_many(jobs)
    monkeypatch.setenv("QWF_THREADS", "4")
    assert worker_count() == 4
    four = evolve_many(jobs)
    for a, b in zip(one, four):
        assert np.array_equal(a.amplitudes, b.amplitudes)
    monkeypatch.setenv("QWF_THREADS", "junk")
    assert worker_count() >= 1
