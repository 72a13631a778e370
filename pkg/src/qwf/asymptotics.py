"""Saddle-point predictions near extremal fronts.

Order-1 fronts are locally Airy; the order-2 front of the critical walk is
governed by the quartic-phase integral ``I(z)``, evaluated here by tapered
quadrature.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError
from .fronts import Front
from .lattice import HoppingConfig, dispersion_eval, group_velocity_extent, omega_derivative
from .special import AiryTable, airy_eval, airy_table, airy_zeros

__all__ = [
    "AiryTable",
    "airy_table",
    "airy_eval",
    "airy_zeros",
    "density_exponent",
    "front_amplitude_law",
    "airy_front_scale",
    "airy_front_wavefunction",
    "quartic_phase_integral",
    "critical_front_wavefunction",
]

QUARTIC_TOL = 1e-6
QUARTIC_MAX_CUTOFF = 512.0
_MAX_SAMPLES = 20_000_000


def density_exponent(k: int) -> float:
    """Power of ``t`` in ``|psi|^2`` at a front of order ``k``: ``-2/(k+2)``."""
    if k < 0:
        raise ValueError("front order must be non-negative")
    return -2.0 / (k + 2)


def front_amplitude_law(k: int, rho: float, t):
    """Single-saddle stationary-phase estimate of ``|psi|`` at a front of order ``k``.

    ``rho = |w^(k+2)(q*)|^(1/(k+2))``. With ``m = k + 2``::

        |psi| ~ Gamma(1/m) / (pi m) * (m! / (rho^m t))^(1/m) * cos(pi / 2m)

    Only the ``t^(-1/m)`` exponent is meant for hard checks; the prefactor is
    the standard normalisation and is informational.
    """
    if k < 0 or int(k) != k:
        raise ValueError("front order must be a non-negative integer")
    rho = abs(float(rho))
    if rho == 0.0 or not math.isfinite(rho):
        raise ValueError("rho must be finite and non-zero; the front order is probably wrong")
    m = int(k) + 2
    t = np.asarray(t, dtype=float)
    pref = math.gamma(1.0 / m) / (math.pi * m) * math.cos(math.pi / (2 * m))
    out = pref * (math.factorial(m) / (rho ** m * t)) ** (1.0 / m)
    return float(out) if out.ndim == 0 else out


def airy_front_scale(front: Front, config: HoppingConfig, t: float) -> float:
    """``kappa = (2 / (|v''(q*)| t))^(1/3)``, the inverse Airy length in sites."""
    if front.order != 1:
        raise ValueError(f"Airy form needs an order-1 front, got order {front.order}")
    curv = abs(float(omega_derivative(config, front.q_star, 3)))
    return (2.0 / (curv * t)) ** (1.0 / 3.0)


def airy_front_wavefunction(front: Front, n, t: float, config: HoppingConfig):
    """Local Airy approximation of ``psi(n, t)`` near an order-1 front.

    ``psi ~ exp(i(q* n - w(q*) t)) kappa Ai(-s kappa (n - v t))`` with ``s`` the
    sign of ``v''(q*)``. Valid for scaled distances ``|z| <= 10``,
    ``z = (n - n_f) / |n_f|^(1/3)``.
    """
    if front.order != 1:
        raise ValueError(f"Airy form needs an order-1 front, got order {front.order}")
    t = float(t)
    if t <= 0:
        raise ValueError("t must be positive")
    n = np.asarray(n, dtype=float)
    n_f = front.velocity * t
    scale = max(abs(n_f), 1.0) ** (1.0 / 3.0)
    if np.any(np.abs(n - n_f) > 10.0 * scale + 1e-9):
        raise ValueError("site outside |z| <= 10 around the front")
    curv = float(omega_derivative(config, front.q_star, 3))
    kappa = (2.0 / (abs(curv) * t)) ** (1.0 / 3.0)
    ai, _ = airy_eval(-math.copysign(1.0, curv) * kappa * (n - n_f))
    phase = np.exp(1j * (front.q_star * n - float(dispersion_eval(config, front.q_star)) * t))
    out = phase * kappa * ai
    return complex(out) if out.ndim == 0 else out


def _simpson_weights(n: int, h: float) -> np.ndarray:
    # composite Simpson on an even number of intervals
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def _quartic_tapered(w: np.ndarray, cutoff: float) -> np.ndarray:
    w = np.atleast_1d(np.asarray(w, dtype=float))
    n = int(math.ceil(cutoff * 20.0 * (cutoff ** 3 + float(np.max(np.abs(w)))) / (2.0 * math.pi)))
    n += n % 2
    if n > _MAX_SAMPLES:
        raise ConvergenceError(f"quartic integral needs {n} samples at cutoff {cutoff}",
                               bracket=(0.0, cutoff))
    xi = np.linspace(0.0, cutoff, n + 1)
    # raised-cosine taper over the outer half of [0, cutoff]
    taper = np.ones_like(xi)
    outer = xi > 0.5 * cutoff
    taper[outer] = 0.5 * (1.0 + np.cos(math.pi * (xi[outer] - 0.5 * cutoff) / (0.5 * cutoff)))
    kernel = np.exp(-0.25j * xi ** 4) * taper * _simpson_weights(n, cutoff / n) / math.pi
    out = np.empty(w.size, dtype=complex)
    rows = max(1, 4_000_000 // (n + 1))
    for i in range(0, w.size, rows):
        out[i:i + rows] = np.cos(np.outer(w[i:i + rows], xi)) @ kernel
    return out


def _quartic(w: np.ndarray) -> np.ndarray:
    """Doubling loop shared by all ``w``; each value stops once it has settled."""
    w = np.asarray(w, dtype=float)
    result = np.empty(w.size, dtype=complex)
    todo = np.arange(w.size)
    cutoff = 4.0 + 2.0 * float(np.max(w, initial=0.0)) ** (1.0 / 3.0)
    prev = _quartic_tapered(w, cutoff)
    while todo.size:
        cutoff *= 2.0
        if cutoff > QUARTIC_MAX_CUTOFF:
            raise ConvergenceError(f"quartic integral did not settle for w={w[todo[0]]}",
                                   bracket=(0.0, cutoff / 2.0))
        cur = _quartic_tapered(w[todo], cutoff)
        done = np.abs(cur - prev) < QUARTIC_TOL
        result[todo[done]] = cur[done]
        todo, prev = todo[~done], cur[~done]
    return result


def quartic_phase_integral(z, beta: float = 1.0):
    """``I(z) = (1/2pi) int exp(i z xi / beta^(1/4)) exp(-i xi^4 / 4) dxi`` over the real line.

    Even in ``z``. Evaluated as ``(1/pi) int_0^Xi cos(w xi) exp(-i xi^4/4)``
    with a raised-cosine taper on the outer half, doubling ``Xi`` until the
    result moves by less than 1e-6.
    """
    beta = float(beta)
    if not beta > 0 or not math.isfinite(beta):
        raise ValueError("beta must be positive")
    za = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(za)) or np.any(np.abs(za) > 10.0):
        raise ValueError("quartic integral supported for |z| <= 10")
    w = np.abs(za) / beta ** 0.25
    # I is even: evaluate each distinct |w| once
    uniq, inv = np.unique(w.ravel(), return_inverse=True)
    out = _quartic(uniq)[inv].reshape(w.shape)
    return complex(out) if out.ndim == 0 else out


def critical_front_wavefunction(n, t: float, beta: float = 1.0):
    """``|psi(n, t)| ~ |I(n / t^(1/4))| / (beta t)^(1/4)`` near the order-2 front at the origin."""
    t = float(t)
    z = np.asarray(n, dtype=float) / t ** 0.25
    return np.abs(quartic_phase_integral(z, beta)) / (beta * t) ** 0.25


def maximal_front_alpha(config: HoppingConfig) -> float:
    v_e, q_e = group_velocity_extent(config)
    return abs(float(omega_derivative(config, q_e, 3))) / v_e
