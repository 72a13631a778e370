import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwf.lattice import (HoppingConfig, config_from_args, dispersion_eval, golden_section_max,
                         group_velocity, group_velocity_extent, load_config, omega_derivative,
                         parse_config_text, reduce_wavevector)

couplings = st.lists(st.floats(-2.0, 2.0, allow_nan=False), min_size=0, max_size=3).map(
    lambda rest: HoppingConfig((1.0, *rest)))
wavevectors = st.floats(-50.0, 50.0, allow_nan=False)


def direct_omega(config, q):
    return sum(2.0 * g * np.cos(J * q) for J, g in enumerate(config.couplings, 1))


@given(couplings, wavevectors)
def test_dispersion_matches_direct_sum(config, q):
    assert dispersion_eval(config, q) == pytest.approx(direct_omega(config, q), abs=1e-12)


@given(couplings, wavevectors)
def test_dispersion_is_even_and_periodic(config, q):
    w = dispersion_eval(config, q)
    assert dispersion_eval(config, -q) == pytest.approx(w, abs=1e-12)
    assert dispersion_eval(config, q + 2 * math.pi) == pytest.approx(w, abs=1e-11)


@given(couplings, st.floats(-3.0, 3.0), st.integers(0, 3))
def test_derivatives_against_central_differences(config, q, m):
    h = 1e-4
    fd = (omega_derivative(config, q + h, m) - omega_derivative(config, q - h, m)) / (2 * h)
    scale = sum(abs(g) * J ** (m + 1) for J, g in enumerate(config.couplings, 1))
    assert omega_derivative(config, q, m + 1) == pytest.approx(fd, abs=1e-6 * scale)


def test_group_velocity_is_first_derivative():
    config = HoppingConfig.from_g(0.3)
    q = np.linspace(-3, 3, 11)
    assert np.allclose(group_velocity(config, q), omega_derivative(config, q, 1))
    assert np.allclose(group_velocity(config, q), -2 * np.sin(q) - 1.2 * np.sin(2 * q))


@given(wavevectors)
def test_reduce_wavevector_range(q):
    r = reduce_wavevector(q)
    assert -math.pi <= r <= math.pi
    assert math.cos(r) == pytest.approx(math.cos(q), abs=1e-9)


@given(st.floats(0.0, 3.0))
def test_velocity_extent_beats_dense_grid(g):
    config = HoppingConfig.from_g(g)
    v_e, q_e = group_velocity_extent(config)
    q = np.linspace(-math.pi, math.pi, 200001)
    grid = np.max(np.abs(group_velocity(config, q)))
    assert v_e >= grid - 1e-12
    assert v_e == pytest.approx(grid, rel=1e-8)
    assert abs(group_velocity(config, q_e)) == pytest.approx(v_e, rel=1e-12)


def test_golden_section_finds_maximum():
    x = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-7)


@pytest.mark.parametrize("bad", [(), (0.5,), (1.0, float("nan")), (2.0, 0.5)])
def test_invalid_couplings_rejected(bad):
    with pytest.raises(ValueError):
        HoppingConfig(bad)


def test_config_properties():
    c = HoppingConfig.from_g(0.25)
    assert c.M == 2 and c.g == 0.25 and not c.is_nearest_neighbour
    assert c.bandwidth == pytest.approx(2.5)
    assert HoppingConfig((1.0, 0.0)).is_nearest_neighbour
    assert config_from_args().couplings == (1.0, 0.0)
    assert config_from_args(couplings=[1.0, 0.1, 0.2]).M == 3


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "walk.cfg"
    path.write_text("# walk\ncouplings = [1.0, 0.5]  # nnn\nt = 100\n")
    assert load_config(path).couplings == (1.0, 0.5)
    assert parse_config_text(path.read_text())["t"] == 100
    (tmp_path / "bad.cfg").write_text("couplings\n")
    with pytest.raises(ValueError):
        load_config(tmp_path / "bad.cfg")
    (tmp_path / "none.cfg").write_text("g = 0.5\n")
    with pytest.raises(ValueError):
        load_config(tmp_path / "none.cfg")
