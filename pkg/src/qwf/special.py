"""Self-contained Bessel J_n and Airy Ai/Ai' evaluation.

Bessel functions come from Miller's downward recurrence. Airy functions are
tabulated on a node grid by continuing the ODE ``y'' = x y`` with local Taylor
series, then evaluated anywhere by one more Taylor step from the nearest node.
Beyond the grid the Poincare asymptotic expansions take over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernels import airy_taylor, bessel_jn_miller

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

AIRY_RANGE = 100.0
_NODE_STEP = 0.25
_X_NEG = -10.5
_X_POS = 8.0


def bessel_j_integer(orders, x: float) -> np.ndarray:
    """``J_n(x)`` for an array of integer orders (negative orders allowed)."""
    orders = np.asarray(orders, dtype=np.int64)
    if orders.size == 0:
        return np.zeros(0)
    nmax = int(np.abs(orders).max())
    table = bessel_jn_miller(float(x), nmax)
    vals = table[np.abs(orders)]
    # J_{-n} = (-1)^n J_n
    odd_negative = (orders < 0) & (orders % 2 == 1)
    return np.where(odd_negative, -vals, vals)


@lru_cache(maxsize=None)
def _asymptotic_coefficients(count: int = 60) -> tuple[np.ndarray, np.ndarray]:
    # u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!),  v_k = -(6k+1)/(6k-1) u_k
    u = [1.0]
    v = [1.0]
    for k in range(1, count):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)
    return np.array(u), np.array(v)


def _truncated(coeffs: np.ndarray, inv: float, signs: np.ndarray) -> float:
    # sum an asymptotic series up to its smallest term
    total = 0.0
    prev = math.inf
    power = 1.0
    for c, s in zip(coeffs, signs):
        term = s * c * power
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if prev < 1e-17 * abs(total):
            break
        power *= inv
    return total


def _airy_asymptotic(x: float) -> tuple[float, float]:
    u, v = _asymptotic_coefficients()
    if x > 0.0:
        zeta = 2.0 / 3.0 * x ** 1.5
        alt = (-1.0) ** np.arange(u.size)
        su = _truncated(u, 1.0 / zeta, alt)
        sv = _truncated(v, 1.0 / zeta, alt)
        pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return pref * x ** -0.25 * su, -pref * x ** 0.25 * sv
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    inv2 = 1.0 / (zeta * zeta)
    alt = (-1.0) ** np.arange(u.size // 2)
    even_u = _truncated(u[0::2], inv2, alt)
    odd_u = _truncated(u[1::2], inv2, alt) / zeta
    even_v = _truncated(v[0::2], inv2, alt)
    odd_v = _truncated(v[1::2], inv2, alt) / zeta
    phase = zeta - math.pi / 4.0
    c, s = math.cos(phase), math.sin(phase)
    ai = (c * even_u + s * odd_u) * z ** -0.25 / math.sqrt(math.pi)
    aip = (s * even_v - c * odd_v) * z ** 0.25 / math.sqrt(math.pi)
    return ai, aip


def _build_nodes() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    neg = np.arange(0.0, _X_NEG - 1e-12, -_NODE_STEP)
    pos = np.arange(_X_POS, -1e-12, -_NODE_STEP)
    ai_neg = np.empty(neg.size)
    aip_neg = np.empty(neg.size)
    ai_neg[0], aip_neg[0] = AI0, AIP0
    for i in range(1, neg.size):
        y, d = airy_taylor(neg[i - 1], ai_neg[i - 1], aip_neg[i - 1], -_NODE_STEP)
        ai_neg[i], aip_neg[i] = float(y), float(d)
    # toward +x the recessive Ai must be integrated backwards from the asymptotic anchor
    ai_pos = np.empty(pos.size)
    aip_pos = np.empty(pos.size)
    ai_pos[0], aip_pos[0] = _airy_asymptotic(_X_POS)
    for i in range(1, pos.size):
        y, d = airy_taylor(pos[i - 1], ai_pos[i - 1], aip_pos[i - 1], -_NODE_STEP)
        ai_pos[i], aip_pos[i] = float(y), float(d)
    # the two chains meet at x = 0; keep the exact constants there
    x = np.concatenate([neg[::-1], pos[::-1][1:]])
    ai = np.concatenate([ai_neg[::-1], ai_pos[::-1][1:]])
    aip = np.concatenate([aip_neg[::-1], aip_pos[::-1][1:]])
    return x, ai, aip


@dataclass(frozen=True)
class AiryTable:
    """Ai and Ai' on the real line plus the first zeros of each.

    Build once with :func:`airy_table`; instances are immutable.
    """

    nodes: np.ndarray = field(repr=False)
    ai_nodes: np.ndarray = field(repr=False)
    aip_nodes: np.ndarray = field(repr=False)
    positive_chain_at_zero: tuple[float, float] = field(repr=False)

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Return ``(Ai(x), Ai'(x))`` for scalar or array ``x`` with ``|x| <= 100``."""
        xa = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(xa)) or np.any(np.abs(xa) > AIRY_RANGE):
            raise ValueError(f"Airy evaluation supported for |x| <= {AIRY_RANGE}")
        flat = xa.ravel()
        ai = np.empty(flat.size)
        aip = np.empty(flat.size)
        inside = (flat >= self.nodes[0]) & (flat <= self.nodes[-1])
        if inside.any():
            xs = flat[inside]
            idx = np.rint((xs - self.nodes[0]) / _NODE_STEP).astype(int)
            idx = np.clip(idx, 0, self.nodes.size - 1)
            y, d = airy_taylor(self.nodes[idx], self.ai_nodes[idx], self.aip_nodes[idx], xs - self.nodes[idx])
            ai[inside], aip[inside] = y, d
        for i in np.flatnonzero(~inside):
            ai[i], aip[i] = _airy_asymptotic(float(flat[i]))
        if xa.ndim == 0:
            return float(ai[0]), float(aip[0])
        return ai.reshape(xa.shape), aip.reshape(xa.shape)

    def zeros(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        return airy_zeros(count, self)


@lru_cache(maxsize=1)
def airy_table() -> AiryTable:
    nodes, ai, aip = _build_nodes()
    # value of the backward (positive-side) chain at x=0, kept for overlap checks
    pos = np.arange(_X_POS, -1e-12, -_NODE_STEP)
    y, d = _airy_asymptotic(_X_POS)
    for i in range(1, pos.size):
        y, d = airy_taylor(pos[i - 1], y, d, -_NODE_STEP)
        y, d = float(y), float(d)
    for arr in (nodes, ai, aip):
        arr.setflags(write=False)
    return AiryTable(nodes, ai, aip, (y, d))


def airy_eval(x):
    """``(Ai(x), Ai'(x))``; valid for ``|x| <= 100``."""
    return airy_table().eval(x)


def _newton(f, x: float, tol: float = 1e-15, maxiter: int = 50) -> float:
    for _ in range(maxiter):
        val, slope = f(x)
        step = val / slope
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    return x


def airy_zeros(count: int, table: AiryTable | None = None) -> tuple[np.ndarray, np.ndarray]:
    """First ``count`` zeros of Ai and of Ai' (negative, decreasing).

    Newton's method from the standard asymptotic estimates; each root is then
    checked to be bracketed by a sign change.
    """
    if not 1 <= count <= 50:
        raise ValueError("count must be in 1..50")
    table = table or airy_table()
    zeros_ai = np.empty(count)
    zeros_aip = np.empty(count)
    for s in range(1, count + 1):
        t = 3.0 * math.pi * (4 * s - 1) / 8.0
        guess = -(t ** (2.0 / 3.0)) * (1 + 5.0 / 48.0 * t ** -2 - 5.0 / 36.0 * t ** -4)
        zeros_ai[s - 1] = _newton(lambda x: table.eval(x), guess)
        t = 3.0 * math.pi * (4 * s - 3) / 8.0
        guess = -(t ** (2.0 / 3.0)) * (1 - 7.0 / 48.0 * t ** -2 + 35.0 / 288.0 * t ** -4)
        # d/dx Ai'(x) = x Ai(x)
        zeros_aip[s - 1] = _newton(lambda x: (table.eval(x)[1], x * table.eval(x)[0]), guess)
    for zs, which in ((zeros_ai, 0), (zeros_aip, 1)):
        for z in zs:
            lo = table.eval(z - 1e-9)[which]
            hi = table.eval(z + 1e-9)[which]
            if lo * hi > 0:
                raise ArithmeticError(f"Airy zero refinement failed near {z}")
    return zeros_ai, zeros_aip
