"""Pure Python/numpy versions of the compiled kernels in _kernels.pyx.

Same algorithms and the same recurrences; results agree with the compiled
path to round-off, not bit-for-bit.
"""
import math

import numpy as np

_BIG = 1e250
_SMALL = 1e-250
# below this the two-term series is exact to round-off and 2n/x may overflow
_TINY_X = 1e-6


def _small_argument(x: float, nmax: int) -> list:
    """``J_n(x) = (x/2)^n / n! (1 - (x/2)^2 / (n + 1))`` for tiny ``x``."""
    half = 0.5 * x
    out, term = [], 1.0
    for n in range(nmax + 1):
        if n:
            term *= half / n
        out.append(term * (1.0 - half * half / (n + 1)))
    return out


def miller_start(x: float, nmax: int) -> int:
    top = max(nmax, math.ceil(x))
    start = top + 24 + math.ceil(12.0 * np.cbrt(x)) + math.ceil(math.sqrt(40.0 * top))
    return start + (start % 2)


def bessel_jn_miller(x: float, nmax: int) -> np.ndarray:
    """J_0(x) .. J_nmax(x) by downward recurrence normalised with J_0 + 2 sum J_2k = 1."""
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    x = float(x)
    out = [0.0] * (nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return np.array(out)
    flip = x < 0.0
    x = abs(x)
    if x < _TINY_X:
        j = np.array(_small_argument(x, nmax))
        if flip:
            j[1::2] = -j[1::2]
        return j
    start = miller_start(x, nmax)
    jp1, jn, norm = 0.0, 1e-300, 0.0
    for n in range(start, 0, -1):
        jm1 = (2.0 * n / x) * jn - jp1
        if n <= nmax:
            out[n] = jn
        if n % 2 == 0:
            norm += 2.0 * jn
        jp1, jn = jn, jm1
        if abs(jn) > _BIG:
            jn *= _SMALL
            jp1 *= _SMALL
            norm *= _SMALL
            for k in range(n, nmax + 1):
                out[k] *= _SMALL
    out[0] = jn
    norm += jn
    j = np.array(out) / norm
    if flip:
        j[1::2] = -j[1::2]
    return j


def _hop(psi: np.ndarray, couplings: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(psi)
    for J, gJ in enumerate(couplings, start=1):
        if gJ == 0.0 or J >= psi.size:
            continue
        acc[:-J] += gJ * psi[J:]
        acc[J:] += gJ * psi[:-J]
    return -1j * acc


def rk4_hopping(psi0, couplings, h: float, nsteps: int) -> np.ndarray:
    """Classical 4-stage Runge-Kutta for i dpsi/dt = H psi on an open chain."""
    psi = np.array(psi0, dtype=np.complex128, copy=True)
    g = np.asarray(couplings, dtype=float)
    half, sixth = 0.5 * h, h / 6.0
    for _ in range(int(nsteps)):
        k1 = _hop(psi, g)
        k2 = _hop(psi + half * k1, g)
        k3 = _hop(psi + half * k2, g)
        k4 = _hop(psi + h * k3, g)
        psi += sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def airy_taylor(x0, y0, dy0, h, max_terms: int = 80):
    """Continue a solution of y'' = x y from (x0, y0, y0') by a step h."""
    x0, a_km1, a_k, h = (np.array(a, dtype=float) for a in np.broadcast_arrays(x0, y0, dy0, h))
    a_kp1 = 0.5 * x0 * a_km1
    s = a_km1 + a_k * h + a_kp1 * h * h
    ds = a_k + 2.0 * a_kp1 * h
    hk = h * h
    quiet = np.zeros(s.shape, dtype=int)
    for k in range(1, max_terms):
        a_kp2 = (x0 * a_k + a_km1) / ((k + 2.0) * (k + 1.0))
        dterm = (k + 2.0) * a_kp2 * hk
        hk = hk * h
        term = a_kp2 * hk
        live = quiet < 3
        s = np.where(live, s + term, s)
        ds = np.where(live, ds + dterm, ds)
        small = np.abs(term) + np.abs(dterm * h) <= 1e-18 * (np.abs(s) + np.abs(ds * h))
        quiet = np.where(live, np.where(small, quiet + 1, 0), quiet)
        a_km1, a_k, a_kp1 = a_k, a_kp1, a_kp2
        if not live.any():
            break
    return s, ds
