import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import jv

from qwf.asymptotics import (airy_front_scale, airy_front_wavefunction, critical_front_wavefunction,
                             density_exponent, front_amplitude_law, maximal_front_alpha,
                             quartic_phase_integral)
from qwf.distribution import front_component
from qwf.evolution import evolve_spectral
from qwf.fronts import find_fronts
from qwf.lattice import HoppingConfig

ROT = np.exp(-1j * np.pi / 8)


def quartic_rotated(w):
    """Same integral with the contour turned by -pi/8, where exp(-i xi^4/4) becomes exp(-r^4/4)."""
    f = lambda r: np.cos(w * r * ROT) * np.exp(-r ** 4 / 4)
    re = quad(lambda r: f(r).real, 0, 12, limit=400, epsabs=1e-13)[0]
    im = quad(lambda r: f(r).imag, 0, 12, limit=400, epsabs=1e-13)[0]
    return ROT * (re + 1j * im) / np.pi


@pytest.mark.parametrize("z", [0.0, 0.7, -2.5, 4.0, 8.0, -10.0])
def test_quartic_against_rotated_contour(z):
    assert abs(quartic_phase_integral(z) - quartic_rotated(abs(z))) < 1e-8


def test_quartic_at_origin_closed_form():
    # I(0) = Gamma(1/4) 4^(1/4) exp(-i pi/8) / (4 pi)
    exact = math.gamma(0.25) * 4 ** 0.25 * np.exp(-1j * np.pi / 8) / (4 * np.pi)
    assert abs(quartic_phase_integral(0.0) - exact) < 1e-8


@given(st.floats(-10, 10), st.floats(1.0, 5.0))
@settings(max_examples=20, deadline=None)
def test_quartic_even_and_beta_scaling(z, beta):
    assert quartic_phase_integral(z, beta) == pytest.approx(quartic_phase_integral(-z, beta), abs=1e-12)
    assert quartic_phase_integral(z, beta) == pytest.approx(quartic_phase_integral(z / beta ** 0.25), abs=1e-12)


def test_quartic_guards():
    with pytest.raises(ValueError):
        quartic_phase_integral(11.0)
    with pytest.raises(ValueError):
        quartic_phase_integral(1.0, beta=0.0)


def test_density_exponents():
    assert density_exponent(0) == -1.0
    assert density_exponent(1) == pytest.approx(-2 / 3)
    assert density_exponent(2) == -0.5
    with pytest.raises(ValueError):
        density_exponent(-1)


def test_amplitude_law_against_bessel_transition():
    # J_nu(nu) ~ Gamma(1/3) / (2^(2/3) 3^(1/6) pi nu^(1/3))
    for t in (1e3, 1e4):
        nu = 2 * t
        assert front_amplitude_law(1, 2.0 ** (1 / 3), t) == pytest.approx(jv(nu, nu), rel=1e-3)
    with pytest.raises(ValueError):
        front_amplitude_law(1, 0.0, 10.0)


def _airy_gap(g, t, reach=3.0):
    config = HoppingConfig.from_g(g)
    front = find_fronts(config).front("right")
    n_f = front.velocity * t
    n = np.arange(math.ceil(n_f - reach * n_f ** (1 / 3)), math.floor(n_f + reach * n_f ** (1 / 3)))
    pred = np.abs(airy_front_wavefunction(front, n, t, config))
    exact = np.abs(evolve_spectral(config, t).psi(n))
    return float(np.max(np.abs(pred - exact)) / np.max(exact))


@pytest.mark.parametrize("g", [0.0, 0.125, 0.5])
def test_airy_form_at_maximal_front(g):
    # corrections fall off like n_f^(-1/3)
    coarse, fine = _airy_gap(g, 1000.0), _airy_gap(g, 8000.0)
    assert coarse < 6e-3
    assert fine < 0.6 * coarse


def test_airy_form_at_internal_front_after_band_filter():
    config = HoppingConfig.from_g(0.5)
    front = find_fronts(config).front("internal-right")
    t = 5000.0
    sites, filtered = front_component(evolve_spectral(config, t), front)
    n_f = front.velocity * t
    sel = np.abs(sites - n_f) <= 5 * n_f ** (1 / 3)
    pred = np.abs(airy_front_wavefunction(front, sites[sel], t, config))
    got = np.abs(filtered[sel])
    assert np.max(np.abs(pred - got)) / np.max(got) < 5e-3


def test_airy_form_guards():
    config = HoppingConfig.from_g(0.0)
    front = find_fronts(config).front("right")
    with pytest.raises(ValueError):
        airy_front_wavefunction(front, [0], 100.0, config)
    with pytest.raises(ValueError):
        airy_front_wavefunction(front, [200], 0.0, config)
    assert airy_front_scale(front, config, 1.0) == pytest.approx(1.0)
    assert maximal_front_alpha(config) == pytest.approx(1.0)


def test_critical_front_converges():
    config = HoppingConfig.from_g(0.25)
    errs = []
    for t in (1e3, 1e5):
        st_ = evolve_spectral(config, t)
        errs.append(abs(abs(st_.psi(0)) / critical_front_wavefunction(0, t) - 1))
    assert errs[1] < 0.02 and errs[1] < errs[0]
