"""Localization measures: IPR, Shannon entropy and return probability."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .evolution import WaveState, evolve_many, evolve_spectral
from .lattice import HoppingConfig


@dataclass(frozen=True)
class MetricSeries:
    """IPR, entropy and ``R_0`` along one parameter axis (``t`` or ``g``)."""

    axis: str
    values: np.ndarray = field(repr=False)
    ipr: np.ndarray = field(repr=False)
    entropy: np.ndarray = field(repr=False)
    r0: np.ndarray = field(repr=False)
    fixed: dict = field(default_factory=dict)

    @property
    def t_r0(self) -> np.ndarray:
        """``t R_0``; along a ``g`` axis the time is the fixed one."""
        t = self.values if self.axis == "t" else self.fixed["t"]
        return t * self.r0

    def argmax(self, name: str) -> float:
        return float(self.values[int(np.argmax(getattr(self, name)))])

    def argmin(self, name: str) -> float:
        return float(self.values[int(np.argmin(getattr(self, name)))])


def _probs(state_or_p) -> np.ndarray:
    if isinstance(state_or_p, WaveState):
        return state_or_p.probabilities
    return np.asarray(state_or_p, dtype=float)


def ipr(state) -> float:
    """``sum_n p_n^2``."""
    p = _probs(state)
    return float(np.dot(p, p))


def shannon_entropy(state) -> float:
    """``-sum_n p_n ln p_n`` with ``0 ln 0 = 0``."""
    p = _probs(state)
    p = p[p > 0]
    return float(-np.dot(p, np.log(p)))


def return_probability(config: HoppingConfig, times) -> MetricSeries:
    """``R_0(t) = |psi(0, t)|^2`` together with IPR and entropy at the same times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    states = evolve_many([(config, float(t)) for t in times])
    return _series("t", times, states, {"g": config.g, "couplings": config.couplings})


def _series(axis, values, states, fixed) -> MetricSeries:
    return MetricSeries(
        axis,
        np.asarray(values, dtype=float),
        np.array([ipr(s) for s in states]),
        np.array([shannon_entropy(s) for s in states]),
        np.array([float(s.p(0)) for s in states]),
        fixed,
    )


def time_scan(config: HoppingConfig, times) -> MetricSeries:
    return return_probability(config, times)


def g_scan(g_values, t: float) -> MetricSeries:
    """Metrics at fixed ``t`` across next-nearest-neighbour ratios ``g``."""
    g_values = np.asarray(g_values, dtype=float)
    states = evolve_many([(HoppingConfig.from_g(float(g)), float(t)) for g in g_values])
    return _series("g", g_values, states, {"t": float(t)})


def g_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid with values rounded to the step's decimals (so 0.25 is exact)."""
    count = int(round((hi - lo) / step)) + 1
    decimals = max(0, -int(np.floor(np.log10(step))) + 2)
    return np.round(lo + step * np.arange(count), decimals)


def entropy_log_fit(config: HoppingConfig, times=None) -> tuple[float, float]:
    """Least-squares ``S = a ln t + b`` over the given times (informational)."""
    if times is None:
        times = np.geomspace(1e3, 1e4, 9)
    s = [shannon_entropy(evolve_spectral(config, float(t))) for t in times]
    a, b = np.polyfit(np.log(times), s, 1)
    return float(a), float(b)
