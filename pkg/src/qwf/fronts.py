"""Extremal fronts: stationary points of the group velocity and their order.

A front of order k sits at a wavevector where the first k derivatives of
``v(q)`` vanish and the (k+1)-th does not. Order-1 fronts carry the Airy
scaling; the q = pi front at ``g = 1/4`` is of order 2.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConvergenceError
from .lattice import HoppingConfig, group_velocity, group_velocity_extent, omega_derivative

G_CRITICAL = 0.25
CRITICAL_WINDOW = 1e-10
DEFAULT_TOL = 1e-9
_SCAN = 4096
_MAX_ORDER = 12


@dataclass(frozen=True)
class Front:
    q_star: float
    velocity: float
    order: int
    alpha: float | None = None  # v''(q*) / v_e, order-1 fronts
    beta: float | None = None  # w''''(q*) / 3!, order-2 fronts
    kind: str = "maximal"

    @property
    def speed(self) -> float:
        return abs(self.velocity)


@dataclass(frozen=True)
class FrontSet:
    fronts: tuple[Front, ...]
    v_e: float
    q_e: float
    v_i: float | None
    q_i: float | None
    regime: str | None

    def by_kind(self, kind: str) -> list[Front]:
        return [f for f in self.fronts if f.kind == kind]

    def front(self, which: str) -> Front:
        """Pick a front by name: ``right``, ``left``, ``internal-right``, ``internal-left``, ``origin``."""
        if which in ("right", "max", "maximal"):
            return max(self.by_kind("maximal"), key=lambda f: f.velocity)
        if which == "left":
            return min(self.by_kind("maximal"), key=lambda f: f.velocity)
        internal = self.by_kind("internal")
        if not internal:
            raise ValueError(f"no internal fronts in regime {self.regime!r}")
        if which in ("internal-right", "internal"):
            return max(internal, key=lambda f: f.velocity)
        if which == "internal-left":
            return min(internal, key=lambda f: f.velocity)
        if which == "origin":
            zero = [f for f in internal if f.velocity == 0.0 or f.order >= 2]
            if not zero:
                raise ValueError("no zero-velocity front")
            return zero[0]
        raise ValueError(f"unknown front {which!r}")

    def to_dict(self) -> dict:
        return {
            "v_e": self.v_e,
            "q_e": self.q_e,
            "v_i": self.v_i,
            "q_i": self.q_i,
            "regime": self.regime,
            "fronts": [asdict(f) for f in self.fronts],
        }


def _bisect_root(f, a: float, b: float, tol: float = 1e-14) -> float:
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ConvergenceError("root not bracketed", bracket=(a, b))
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0:
            b, fb = m, fm
        else:
            a, fa = m, fm
        if b - a <= tol:
            return 0.5 * (a + b)
    raise ConvergenceError(f"bisection did not reach {tol} in q", bracket=(a, b))


def _min_abs(f, a: float, b: float) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - phi * (b - a), a + phi * (b - a)
    while b - a > 1e-13:
        if abs(f(c)) < abs(f(d)):
            b, d = d, c
            c = b - phi * (b - a)
        else:
            a, c = c, d
            d = a + phi * (b - a)
    return 0.5 * (a + b)


def _nn_ratio_critical(config: HoppingConfig) -> str | None:
    """For a two-range walk, which zone edge (if any) is at the critical ratio."""
    if config.M != 2:
        return None
    if abs(config.g - G_CRITICAL) < CRITICAL_WINDOW:
        return "pi"
    if abs(config.g + G_CRITICAL) < CRITICAL_WINDOW:
        return "zero"
    return None


def stationary_velocity_points(config: HoppingConfig, tol: float = DEFAULT_TOL) -> list[float]:
    """All ``q`` in ``[0, pi]`` with ``v'(q) = 0``, sorted."""
    v_e = group_velocity_extent(config)[0]

    def dv(q):
        return float(omega_derivative(config, q, 2))

    grid = np.linspace(0.0, math.pi, _SCAN + 1)
    vals = omega_derivative(config, grid, 2)
    roots: list[float] = []
    for i in range(_SCAN):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 and 0 < i:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(_bisect_root(dv, float(grid[i]), float(grid[i + 1])))
    # double roots do not change sign: look at small local minima of |v'|
    mags = np.abs(vals)
    for i in range(1, _SCAN):
        if mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1] and vals[i - 1] * vals[i + 1] > 0:
            q = _min_abs(dv, float(grid[i - 1]), float(grid[i + 1]))
            if abs(dv(q)) / v_e < tol:
                roots.append(q)

    edge = _nn_ratio_critical(config)
    for q_edge, name in ((0.0, "zero"), (math.pi, "pi")):
        if config.M == 2:
            is_root = edge == name or dv(q_edge) == 0.0
        else:
            is_root = abs(dv(q_edge)) / v_e < tol
        if is_root:
            # a sign-change root squeezed against a degenerate edge is the same front
            roots = [r for r in roots if abs(r - q_edge) > 1e-3]
            roots.append(q_edge)
        elif config.M == 2:
            roots = [r for r in roots if r != q_edge]

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and r - merged[-1] < 1e-9:
            continue
        merged.append(r)
    return merged


def front_order(config: HoppingConfig, q: float, v_e: float, tol: float = DEFAULT_TOL) -> int:
    """Smallest ``k >= 1`` with ``v^(k+1)(q) != 0`` (normalised by ``v_e``)."""
    for k in range(1, _MAX_ORDER):
        if abs(float(omega_derivative(config, q, k + 2))) / v_e >= tol:
            return k
    raise ConvergenceError(f"all velocity derivatives up to order {_MAX_ORDER} vanish at q={q}")


def find_fronts(config: HoppingConfig, tol: float = DEFAULT_TOL) -> FrontSet:
    """Locate and classify every extremal front of the walk."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    v_e, q_e = group_velocity_extent(config)
    fronts: list[Front] = []
    for q in stationary_velocity_points(config, tol):
        k = front_order(config, q, v_e, tol)
        v = float(group_velocity(config, q))
        if abs(q) < 1e-15 or abs(q - math.pi) < 1e-15:
            v = 0.0  # sin(J pi) round-off
        kind = "maximal" if abs(abs(v) - v_e) <= 1e-9 * v_e else "internal"
        alpha = float(omega_derivative(config, q, 3)) / v_e if k == 1 else None
        beta = float(omega_derivative(config, q, 4)) / 6.0 if k == 2 else None
        fronts.append(Front(q, v, k, alpha, beta, kind))
        if 0.0 < q < math.pi:
            fronts.append(Front(-q, -v, k, None if alpha is None else -alpha, beta, kind))
    fronts.sort(key=lambda f: (f.velocity, f.q_star))

    maximal = [f for f in fronts if f.kind == "maximal" and f.q_star > 0]
    if maximal:
        q_e = maximal[0].q_star
    internal = [f for f in fronts if f.kind == "internal" and f.q_star >= 0]
    v_i = max((f.speed for f in internal), default=None)
    q_i = None
    if internal:
        q_i = max(internal, key=lambda f: (f.speed, f.q_star)).q_star
    return FrontSet(tuple(fronts), v_e, q_e, v_i, q_i, _regime(config, fronts))


def _regime(config: HoppingConfig, fronts: list[Front]) -> str:
    if config.M == 2 and config.g >= 0:
        if abs(config.g - G_CRITICAL) < CRITICAL_WINDOW:
            return "critical"
        return "single_cone" if config.g < G_CRITICAL else "nested_cones"
    internal = [f for f in fronts if f.kind == "internal"]
    if not internal:
        return "single_cone"
    if all(f.order >= 2 and f.velocity == 0.0 for f in internal):
        return "critical"
    return "nested_cones"


def closed_form_velocities(g: float) -> tuple[float, float | None]:
    """Maximal and internal front speeds of the nearest + next-nearest walk.

    Both are written without the subtraction that cancels catastrophically:
    with ``A = -1 + 320 g^2 + 2048 g^4`` and ``s = sqrt(1 + 128 g^2)``,
    ``v_e^2 = (A + s^3) / (128 g^2)`` where ``s^3 - 1`` goes through expm1, and
    ``v_i^2 = 8 (16 g^2 - 1)^3 / (A + s^3)``, which vanishes exactly at g = 1/4.
    """
    g = float(g)
    if not math.isfinite(g) or g < 0:
        raise ValueError(f"g must be finite and non-negative, got {g}")
    if g == 0.0:
        return 2.0, None
    g2 = g * g
    s3_minus_1 = math.expm1(1.5 * math.log1p(128.0 * g2))
    plus = 320.0 * g2 + 2048.0 * g2 * g2 + s3_minus_1  # A + s^3
    v_e = math.sqrt(plus / (128.0 * g2))
    if g < G_CRITICAL:
        return v_e, None
    v_i = math.sqrt(max(8.0 * (16.0 * g2 - 1.0) ** 3 / plus, 0.0))
    return v_e, v_i


def _as_config(g_or_config) -> HoppingConfig:
    if isinstance(g_or_config, HoppingConfig):
        return g_or_config
    return HoppingConfig.from_g(float(g_or_config))


def anomalous_magnetization(g_or_config) -> float:
    """``m = 1/2 - q_e/pi`` below the critical ratio, ``(q_i - q_e)/pi - 1/2`` above.

    Equals half the difference between the Brillouin-zone fractions with
    positive and negative band curvature ``w''(q)``.
    """
    config = _as_config(g_or_config)
    if config.M == 2 and config.g < 0:
        raise ValueError("g must be non-negative")
    fs = find_fronts(config)
    q_e = abs(fs.q_e)
    if fs.regime == "single_cone":
        return 0.5 - q_e / math.pi
    q_i = math.pi if fs.regime == "critical" else abs(fs.q_i)
    return (q_i - q_e) / math.pi - 0.5


def curvature_fraction_magnetization(config: HoppingConfig, points: int = 1 << 20) -> float:
    """Independent estimate of the anomalous magnetization from the sign of ``w''`` on a grid."""
    q = -math.pi + 2.0 * math.pi * (np.arange(points) + 0.5) / points
    curv = omega_derivative(config, q, 2)
    return 0.5 * float(np.mean(np.sign(curv)))


def local_wavevector(amplitudes: np.ndarray, sites: np.ndarray, center: float,
                     half_width: float | None = None, pad: int = 1 << 16) -> float:
    """Dominant ``|q|`` of ``psi`` in a Hann window around ``center``.

    Peak of the zero-padded windowed DFT, refined by a parabola through the
    three largest bins. The default half width is ``2 |center|^(1/3)`` sites,
    narrow enough to keep a front's Airy lobe and exclude other branches.
    """
    if half_width is None:
        half_width = 2.0 * max(abs(center), 1.0) ** (1.0 / 3.0)
    sel = np.abs(sites - center) <= half_width
    if sel.sum() < 5:
        raise ValueError("window holds fewer than five sites")
    seg = amplitudes[sel] * np.hanning(int(sel.sum()))
    spec = np.abs(np.fft.fft(seg, pad))
    i = int(np.argmax(spec))
    a, b, c = spec[i - 1], spec[i], spec[(i + 1) % pad]
    den = a - 2.0 * b + c
    off = 0.5 * (a - c) / den if den != 0 else 0.0
    q = 2.0 * math.pi * (np.fft.fftfreq(pad)[i] + off / pad)
    return abs(math.remainder(q, 2.0 * math.pi))


def magnetization_from_wavevectors(q_e: float, q_i: float | None = None) -> float:
    """``1/2 - q_e/pi`` without an internal front, ``(q_i - q_e)/pi - 1/2`` with one."""
    if q_i is None:
        return 0.5 - abs(q_e) / math.pi
    return (abs(q_i) - abs(q_e)) / math.pi - 0.5


def _peak_near(p: np.ndarray, sites: np.ndarray, n0: float, half: float) -> int:
    sel = np.flatnonzero(np.abs(sites - n0) <= half)
    # a three-site running mean tames interference with other branches
    smooth = np.convolve(p, np.ones(3) / 3.0, mode="same")
    return int(sites[sel[np.argmax(smooth[sel])]])


def measured_magnetization(state, fronts: FrontSet | None = None) -> tuple[float, dict]:
    """Anomalous magnetization from an evolved state.

    Fronts are located as density maxima near ``v t``; the wavevector at each
    comes from :func:`local_wavevector`. Returns the value and the measured
    positions and wavevectors.
    """
    config = state.config
    fronts = fronts or find_fronts(config)
    t = state.time
    p = state.probabilities
    sites = state.sites
    n_e = _peak_near(p, sites, fronts.v_e * t, 4.0 * (fronts.v_e * t) ** (1.0 / 3.0))
    q_e = local_wavevector(state.amplitudes, sites, n_e)
    info = {"n_e": n_e, "q_e": q_e}
    if fronts.regime == "single_cone":
        return magnetization_from_wavevectors(q_e), info
    if fronts.regime == "critical":
        n_i = 0
        q_i = local_wavevector(state.amplitudes, sites, 0.0, 2.0 * t ** 0.25)
    else:
        n_i = _peak_near(p, sites, fronts.v_i * t, 4.0 * (fronts.v_i * t) ** (1.0 / 3.0))
        q_i = local_wavevector(state.amplitudes, sites, n_i)
    info.update(n_i=n_i, q_i=q_i)
    return magnetization_from_wavevectors(q_e, q_i), info
