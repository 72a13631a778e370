import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from qwf import localization as loc
from qwf.evolution import evolve_spectral
from qwf.lattice import HoppingConfig

distributions = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=60).filter(lambda x: sum(x) > 1e-3).map(
    lambda x: np.array(x) / sum(x))


@given(distributions)
def test_metric_bounds(p):
    n = p.size
    assert 1.0 / n - 1e-12 <= loc.ipr(p) <= 1.0 + 1e-12
    assert -1e-12 <= loc.shannon_entropy(p) <= np.log(n) + 1e-12
    # Renyi ordering: S_2 = -ln IPR <= S_1
    assert -np.log(loc.ipr(p)) <= loc.shannon_entropy(p) + 1e-12


def test_uniform_and_point():
    assert loc.ipr(np.full(8, 0.125)) == pytest.approx(0.125)
    assert loc.shannon_entropy(np.full(8, 0.125)) == pytest.approx(np.log(8))
    assert loc.ipr([0, 1, 0]) == 1.0 and loc.shannon_entropy([0, 1, 0]) == 0.0


def test_return_probability_closed_form():
    t = np.linspace(0.5, 30, 25)
    series = loc.return_probability(HoppingConfig.from_g(0.0), t)
    assert np.allclose(series.r0, jv(0, 2 * t) ** 2, atol=1e-13)
    assert np.allclose(series.t_r0, t * series.r0)
    # IPR of the Bessel walk: sum_n J_n(2t)^4
    n = np.arange(-200, 201)
    assert np.allclose(series.ipr, [np.sum(jv(n, 2 * x) ** 4) for x in t], atol=1e-13)


def test_g_scan_and_grid():
    grid = loc.g_grid(0.15, 0.35, 0.01)
    assert grid.size == 21 and 0.25 in grid
    series = loc.g_scan(grid[:3], 100.0)
    assert series.axis == "g" and series.fixed == {"t": 100.0}
    state = evolve_spectral(HoppingConfig.from_g(grid[1]), 100.0)
    assert series.ipr[1] == pytest.approx(loc.ipr(state))
    assert series.argmax("ipr") in grid[:3]


def test_entropy_grows_logarithmically():
    a, _ = loc.entropy_log_fit(HoppingConfig.from_g(0.0), np.geomspace(100, 1000, 5))
    assert 0.8 < a < 1.2
