"""Time evolution of a particle started at site 0.

Three independent routes:

* :func:`evolve_spectral` -- exact evolution on a ring of ``L`` sites through one
  inverse FFT of ``exp(-i w(q) t)``; the ring is sized so nothing wraps around.
* :func:`evolve_bessel` -- the closed form ``psi(n, t) = i^-n J_n(2t)`` of the
  nearest-neighbour walk.
* :func:`evolve_ode` -- fixed-step RK4 on an open chain, kept as an oracle.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import StepSizeError, WindowTooSmallError
from .kernels import rk4_hopping
from .lattice import HoppingConfig, dispersion_eval, group_velocity_extent
from .special import bessel_j_integer

BOUNDARY_TOL = 1e-20


@dataclass(frozen=True)
class WaveState:
    """Amplitudes ``psi(n, t)`` on the contiguous sites ``n_min .. n_max``."""

    time: float
    n_min: int
    amplitudes: np.ndarray = field(repr=False)
    method: str = "spectral"
    ring_size: int | None = None
    config: HoppingConfig | None = None

    @property
    def n_max(self) -> int:
        return self.n_min + self.amplitudes.size - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real ** 2 + self.amplitudes.imag ** 2

    def index(self, n):
        """Array index of site ``n`` (raises if outside the window)."""
        n = np.asarray(n)
        if np.any(n < self.n_min) or np.any(n > self.n_max):
            raise IndexError(f"site outside window [{self.n_min}, {self.n_max}]")
        return n - self.n_min

    def psi(self, n):
        return self.amplitudes[self.index(n)]

    def p(self, n):
        return self.probabilities[self.index(n)]

    def restrict(self, n_lo: int, n_hi: int) -> "WaveState":
        lo = max(n_lo, self.n_min)
        hi = min(n_hi, self.n_max)
        return WaveState(self.time, lo, self.amplitudes[lo - self.n_min: hi - self.n_min + 1],
                         self.method, self.ring_size, self.config)


@lru_cache(maxsize=256)
def maximal_velocity(config: HoppingConfig) -> float:
    return group_velocity_extent(config)[0]


def margin(t: float, config: HoppingConfig | None = None) -> int:
    """Safety margin beyond the light cone; covers the Airy tail.

    One unit of Airy argument spans ``(|w'''| t / 2)^(1/3)`` sites and ``Ai^2``
    falls below 1e-20 past an argument of about 10.5. ``|w'''|`` is bounded by
    ``sum_J 2 |g_J| J^3`` (2 without a config).
    """
    curv = 2.0 if config is None else sum(2.0 * abs(c) * J ** 3 for J, c in enumerate(config.couplings, 1))
    return max(64, math.ceil(12.0 * (0.5 * curv * t) ** (1.0 / 3.0)))


def auto_ring_size(config: HoppingConfig, t: float) -> int:
    need = 2 * (math.ceil(maximal_velocity(config) * t) + margin(t, config))
    return 1 << max(need - 1, 1).bit_length()


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"time must be finite and non-negative, got {t}")
    return t


@lru_cache(maxsize=12)
def _spectral_cached(config: HoppingConfig, t: float, L: int) -> WaveState:
    k = np.arange(L)
    q = 2.0 * math.pi * k / L
    phase = np.exp(-1j * t * dispersion_eval(config, q))
    # numpy's ifft carries the 1/L of the ring sum
    psi = np.fft.fftshift(np.fft.ifft(phase))
    psi.setflags(write=False)
    state = WaveState(t, -L // 2, psi, "spectral", L, config)
    edge = max(state.probabilities[0], state.probabilities[-1])
    if edge > BOUNDARY_TOL:
        raise WindowTooSmallError(
            f"|psi|^2 = {edge:.3e} at the ring edge (L={L}, t={t}); increase the ring size/margin"
        )
    return state


def evolve_spectral(config: HoppingConfig, t: float, ring_size: int | None = None) -> WaveState:
    """Exact finite-ring evolution of ``psi(n, 0) = delta_{n,0}``.

    ``psi(n, t) = (1/L) sum_q exp(i(n q - w(q) t))`` over the ``L`` ring momenta.
    The returned window is the whole ring, ``n = -L/2 .. L/2 - 1``.
    """
    t = _check_time(t)
    L = auto_ring_size(config, t) if ring_size is None else int(ring_size)
    if L < 2:
        raise ValueError("ring size must be at least 2")
    return _spectral_cached(config, t, L)


def bessel_window(t: float) -> tuple[int, int]:
    half = math.ceil(2.0 * t) + margin(t)
    return -half, half


def evolve_bessel(t: float, window: tuple[int, int] | None = None) -> WaveState:
    """Nearest-neighbour walk in closed form, ``psi(n, t) = i^-n J_n(2t)``."""
    t = _check_time(t)
    n_lo, n_hi = bessel_window(t) if window is None else (int(window[0]), int(window[1]))
    if n_hi < n_lo:
        raise ValueError("empty window")
    n = np.arange(n_lo, n_hi + 1)
    j = bessel_j_integer(n, 2.0 * t)
    # i^-n cycles through 1, -i, -1, i
    phases = np.array([1.0, -1j, -1.0, 1j])[np.mod(n, 4)]
    return WaveState(t, n_lo, phases * j, "bessel", None, HoppingConfig((1.0,)))


def default_ode_step(config: HoppingConfig) -> float:
    return 0.01 / config.bandwidth


def evolve_ode(config: HoppingConfig, t: float, half_width: int | None = None,
               step: float | None = None) -> WaveState:
    """RK4 integration of ``i dpsi/dt = sum_J g_J (psi_{n+J} + psi_{n-J})`` on ``2N+1`` sites.

    Only meant as an oracle for :func:`evolve_spectral` at modest ``t``.
    """
    t = _check_time(t)
    v_e = maximal_velocity(config)
    N = math.ceil(v_e * t) + 65 if half_width is None else int(half_width)
    if N <= v_e * t + 64:
        raise ValueError(f"half width {N} must exceed v_e t + 64 = {v_e * t + 64:.1f}")
    h = default_ode_step(config) if step is None else float(step)
    if h <= 0.0:
        raise ValueError("step must be positive")
    nsteps = math.ceil(t / h) if t > 0 else 0
    psi0 = np.zeros(2 * N + 1, dtype=np.complex128)
    psi0[N] = 1.0
    if nsteps:
        psi = rk4_hopping(psi0, np.asarray(config.couplings), t / nsteps, nsteps)
    else:
        psi = psi0
    drift = abs(float(np.sum(np.abs(psi) ** 2)) - 1.0)
    if drift > 1e-6:
        raise StepSizeError(f"norm drift {drift:.2e} after {nsteps} steps; reduce the step")
    return WaveState(t, -N, psi, "ode", None, config)


def worker_count() -> int:
    raw = os.environ.get("QWF_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def evolve_many(jobs, method: str = "spectral") -> list[WaveState]:
    """Evaluate many ``(config, t)`` pairs; output order follows ``jobs``."""
    funcs = {
        "spectral": lambda job: evolve_spectral(*job),
        "ode": lambda job: evolve_ode(*job),
        "bessel": lambda job: evolve_bessel(job[1]),
    }
    if method not in funcs:
        raise ValueError(f"unknown method {method!r}")
    jobs = list(jobs)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(funcs[method], jobs))


def evolve(config: HoppingConfig, t: float, method: str = "spectral") -> WaveState:
    if method == "spectral":
        return evolve_spectral(config, t)
    if method == "ode":
        return evolve_ode(config, t)
    if method == "bessel":
        if not config.is_nearest_neighbour:
            raise ValueError("the Bessel closed form needs a nearest-neighbour-only walk")
        return evolve_bessel(t)
    raise ValueError(f"unknown method {method!r}")
