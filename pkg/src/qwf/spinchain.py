"""Domain-wall quench of free fermions with the walk's hopping.

Jordan-Wigner maps the XX + (XZX + YZY) chain onto spinless fermions with
nearest and next-nearest hopping. Starting from all sites ``n <= 0`` filled,
each fermion spreads with the single-particle propagator, so the density is
``rho(n, t) = sum_{m <= 0} |U_{n,m}(t)|^2``. The (J, K) to (g_1, g_2)
normalisation is left to the caller: everything here is parameterised by the
hopping couplings directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distribution import StaircaseReport, cumulative, staircase_extract
from .evolution import WaveState, evolve_spectral, margin, maximal_velocity
from .fronts import (FrontSet, anomalous_magnetization, find_fronts, local_wavevector,
                     magnetization_from_wavevectors)
from .lattice import HoppingConfig


@dataclass(frozen=True)
class DomainWallProfile:
    """Occupation ``rho(n, t)``; the wall starts between sites 0 and 1."""

    time: float
    sites: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    method: str = "propagator"

    @property
    def magnetization(self) -> np.ndarray:
        return self.rho - 0.5

    def at(self, n):
        idx = np.asarray(n) - self.sites[0]
        if np.any(idx < 0) or np.any(idx >= self.sites.size):
            raise IndexError("site outside the profile window")
        return self.rho[idx]


def initial_profile(sites) -> np.ndarray:
    return (np.asarray(sites) <= 0).astype(float)


def domain_wall_from_state(state: WaveState) -> DomainWallProfile:
    """``rho(n) = sum_{m<=0} p(n - m)`` as an FFT convolution of ``p`` with the filled half.

    Translation invariance gives ``U_{n,m} = psi(n - m)``. Sources
    ``m = n_min - n_max .. 0`` already reach every ``j = n - m`` up to the
    window edge; beyond it ``p`` is below the evolution's 1e-20 edge bound.
    """
    p = state.probabilities
    size = p.size
    m_lo = state.n_min - state.n_max
    filled = np.ones(size)  # m = m_lo .. 0
    L = 1 << (2 * size - 1).bit_length()
    conv = np.fft.irfft(np.fft.rfft(p, L) * np.fft.rfft(filled, L), L)
    # conv[k] = sum_i p[i] filled[k - i] with n = (n_min + i) + (m_lo + l)
    sites = state.sites
    rho = conv[sites - state.n_min - m_lo]
    return DomainWallProfile(state.time, sites, np.clip(rho, 0.0, 1.0), "propagator")


def domain_wall_density(config: HoppingConfig, t: float, window: tuple[int, int] | None = None) -> DomainWallProfile:
    """Density after a domain-wall quench, from the single-particle propagator."""
    state = evolve_spectral(config, t)
    prof = domain_wall_from_state(state)
    if window is None:
        return prof
    lo, hi = int(window[0]), int(window[1])
    reach = maximal_velocity(config) * t + margin(t, config)
    if lo > -reach or hi < reach:
        raise ValueError(f"window [{lo}, {hi}] must span the cone +-{reach:.0f}")
    lo, hi = max(lo, prof.sites[0]), min(hi, prof.sites[-1])
    sel = (prof.sites >= lo) & (prof.sites <= hi)
    return DomainWallProfile(prof.time, prof.sites[sel], prof.rho[sel], prof.method)


def open_chain_hamiltonian(config: HoppingConfig, half_width: int) -> np.ndarray:
    size = 2 * half_width + 1
    H = np.zeros((size, size))
    for J, gJ in enumerate(config.couplings, start=1):
        idx = np.arange(size - J)
        H[idx, idx + J] = gJ
        H[idx + J, idx] = gJ
    return H


def domain_wall_exact(config: HoppingConfig, t: float, half_width: int | None = None) -> DomainWallProfile:
    """Many-fermion evolution on an open chain via the correlation matrix.

    ``C(t) = U C(0) U^dagger`` with ``U = exp(-i H t)`` from a dense
    eigendecomposition; ``rho = diag C``. Costs ``O(N^3)``; only for modest ``t``.
    """
    if half_width is None:
        half_width = math.ceil(maximal_velocity(config) * t) + 65
    H = open_chain_hamiltonian(config, half_width)
    w, V = np.linalg.eigh(H)
    U = (V * np.exp(-1j * w * t)) @ V.conj().T
    sites = np.arange(-half_width, half_width + 1)
    filled = sites <= 0
    rho = np.sum(np.abs(U[:, filled]) ** 2, axis=1)
    return DomainWallProfile(float(t), sites, rho, "correlation-matrix")


def complementary_cumulative(state: WaveState) -> tuple[np.ndarray, np.ndarray]:
    """``1 - Phi(n - 1)`` on the state's sites (with ``Phi(n_min - 1) = 0``)."""
    prof = cumulative(state)
    shifted = np.concatenate([[0.0], prof.Phi[:-1]])
    return prof.sites, 1.0 - shifted


def identity_error(config: HoppingConfig, t: float) -> float:
    """``max_n |rho(n, t) - (1 - Phi(n - 1, t))|`` over the whole ring window."""
    state = evolve_spectral(config, t)
    prof = domain_wall_from_state(state)
    _, ref = complementary_cumulative(state)
    return float(np.max(np.abs(prof.rho - ref)))


def staircase_in_magnetization(config: HoppingConfig, t: float, front: str = "right",
                               steps: int = 5) -> StaircaseReport:
    """Staircase read off ``1 - rho(n + 1)``, which equals ``Phi(n)``.

    The step statistics come out identical to the single-particle staircase.
    """
    fronts = find_fronts(config)
    state = evolve_spectral(config, t)
    prof = domain_wall_from_state(state)
    # rebuild the probabilities the staircase needs from the density: p(n) = rho(n) - rho(n+1)
    p = prof.rho[:-1] - prof.rho[1:]
    amps = state.amplitudes[:-1]
    phase = np.exp(1j * np.angle(amps))
    surrogate = WaveState(t, state.n_min, np.sqrt(np.clip(p, 0.0, None)) * phase,
                          "spinchain", state.ring_size, config)
    return staircase_extract(surrogate, fronts.front(front), steps, config)


def _steepest_descent(prof: DomainWallProfile, center: float, half: float) -> int:
    drop = prof.rho[:-1] - prof.rho[1:]
    drop = np.convolve(drop, np.ones(3) / 3.0, mode="same")
    sites = prof.sites[:-1]
    sel = np.flatnonzero(np.abs(sites - center) <= half)
    return int(sites[sel[np.argmax(drop[sel])]])


@dataclass(frozen=True)
class MagnetizationEstimate:
    value: float
    predicted: float
    fronts: dict


def magnetization_from_profile(config: HoppingConfig, t: float) -> MagnetizationEstimate:
    """Anomalous magnetization measured on the quenched chain.

    Fronts are the steepest-descent points of ``rho`` near ``v t``; their
    wavevectors come from the orbital of the fermion that starts at the wall
    (site 0), read in a window of ``2 n_f^(1/3)`` sites.
    """
    fronts: FrontSet = find_fronts(config)
    state = evolve_spectral(config, t)
    prof = domain_wall_from_state(state)
    n_e = _steepest_descent(prof, fronts.v_e * t, 4.0 * (fronts.v_e * t) ** (1.0 / 3.0))
    q_e = local_wavevector(state.amplitudes, state.sites, n_e)
    info = {"n_e": n_e, "q_e": q_e}
    q_i = None
    if fronts.regime == "critical":
        q_i = local_wavevector(state.amplitudes, state.sites, 0.0, 2.0 * t ** 0.25)
        info.update(n_i=0, q_i=q_i)
    elif fronts.regime == "nested_cones":
        n_i = _steepest_descent(prof, fronts.v_i * t, 4.0 * (fronts.v_i * t) ** (1.0 / 3.0))
        q_i = local_wavevector(state.amplitudes, state.sites, n_i)
        info.update(n_i=n_i, q_i=q_i)
    value = magnetization_from_wavevectors(q_e, q_i)
    return MagnetizationEstimate(value, anomalous_magnetization(config), info)


def particle_number_change(prof: DomainWallProfile) -> float:
    return float(np.sum(prof.rho - initial_profile(prof.sites)))
