"""Cumulative distributions, global n/t scaling and the Airy staircase near fronts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError
from .evolution import WaveState, evolve_spectral
from .fronts import Front, FrontSet, find_fronts
from .lattice import HoppingConfig, group_velocity, omega_derivative
from .special import airy_eval, airy_zeros

FRONT_WINDOW = 6.0
FRONT_BAND = 0.6


@dataclass(frozen=True)
class CumulativeProfile:
    """``Phi(n) = sum_{m <= n} p(m)`` (inclusive) and the midpoint form ``Phi - p/2``.

    The inclusive form obeys ``Phi(-n-1) = 1 - Phi(n)`` for a reflection-symmetric
    walk; the midpoint form is exactly antisymmetric about ``n = 0``.
    """

    time: float
    sites: np.ndarray = field(repr=False)
    Phi: np.ndarray = field(repr=False)
    Phi_mid: np.ndarray = field(repr=False)

    @property
    def u(self) -> np.ndarray:
        """Scaled abscissa ``n / t`` (lattice units times g_1)."""
        if self.time == 0:
            return np.where(self.sites == 0, 0.0, np.sign(self.sites) * np.inf)
        return self.sites / self.time

    def at(self, n, midpoint: bool = False):
        idx = np.asarray(n) - self.sites[0]
        if np.any(idx < 0) or np.any(idx >= self.sites.size):
            raise IndexError("site outside the profile window")
        arr = self.Phi_mid if midpoint else self.Phi
        return arr[idx]


def cumulative(state: WaveState) -> CumulativeProfile:
    p = state.probabilities
    Phi = np.cumsum(p)
    return CumulativeProfile(state.time, state.sites, Phi, Phi - 0.5 * p)


# global scaling curve ---------------------------------------------------------

def velocity_branches(config: HoppingConfig, fronts: FrontSet | None = None) -> list[tuple[float, float]]:
    """Intervals of ``[-pi, pi]`` on which ``v(q)`` is monotone, split at the fronts."""
    fronts = fronts or find_fronts(config)
    cuts = sorted({-math.pi, math.pi, *(f.q_star for f in fronts.fronts)})
    cuts = [c for c in cuts if -math.pi <= c <= math.pi]
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b - a > 1e-14]


def _measure_below(config: HoppingConfig, a: float, b: float, u: np.ndarray) -> np.ndarray:
    """Length of ``{q in [a, b] : v(q) <= u}`` on a monotone piece, by vectorised bisection."""
    va, vb = float(group_velocity(config, a)), float(group_velocity(config, b))
    increasing = vb >= va
    lo_v, hi_v = min(va, vb), max(va, vb)
    out = np.where(u >= hi_v, b - a, 0.0)
    inside = (u > lo_v) & (u < hi_v)
    if not inside.any():
        return out
    uu = u[inside]
    lo = np.full(uu.size, a)
    hi = np.full(uu.size, b)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = group_velocity(config, mid) <= uu
        # on an increasing piece the set {v <= u} is [a, root]
        if increasing:
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        else:
            hi = np.where(below, mid, hi)
            lo = np.where(below, lo, mid)
    root = 0.5 * (lo + hi)
    resid = np.abs(group_velocity(config, root) - uu)
    if np.any(resid > 1e-9 * max(1.0, hi_v - lo_v)) and np.any(np.abs(hi - lo) > 1e-12):
        bad = uu[np.argmax(resid)]
        raise ConvergenceError(f"branch inversion failed at u={bad}", bracket=(a, b))
    out[inside] = (root - a) if increasing else (b - root)
    return out


def global_scaling_curve(config: HoppingConfig, u, fronts: FrontSet | None = None):
    """Asymptotic ``Phi(u t, t)``: the fraction of the zone with ``v(q) <= u``.

    Each monotone branch of ``v`` between consecutive fronts is inverted by
    bisection. For the nearest-neighbour walk this is ``1/2 + asin(u/2)/pi``.
    """
    fronts = fronts or find_fronts(config)
    ua = np.asarray(u, dtype=float)
    if np.any(np.abs(ua) > 1.2 * fronts.v_e + 1e-12):
        raise ValueError("u must lie within 1.2 v_e of the origin")
    flat = ua.ravel()
    total = np.zeros(flat.size)
    for a, b in velocity_branches(config, fronts):
        total += _measure_below(config, a, b, flat)
    out = np.clip(total / (2.0 * math.pi), 0.0, 1.0).reshape(ua.shape)
    return float(out) if out.ndim == 0 else out


def front_exclusion(front: Front, t: float, width: float = FRONT_WINDOW) -> float:
    """Half-width in sites of the window where global scaling is not expected."""
    n_f = abs(front.velocity) * t
    return width * max(n_f ** (1.0 / 3.0), t ** (1.0 / (front.order + 2)))


@dataclass(frozen=True)
class CollapseReport:
    times: tuple
    max_pairwise: float
    max_theory: float
    per_time: tuple  # sup |Phi - Phi_hat| outside front windows, per time


def scaling_collapse_test(config: HoppingConfig, times, width: float = FRONT_WINDOW,
                          states=None, grid_points: int = 2001) -> CollapseReport:
    """Sup-norm distance between ``Phi(n, t)`` and the global scaling curve.

    Sites within ``width * n_f^(1/3)`` of any front are excluded (or
    ``width * t^(1/(k+2))`` for a slower order-k front). Pairwise deviation
    between times is measured on a common ``u`` grid by linear interpolation.
    """
    times = tuple(float(t) for t in times)
    fronts = find_fronts(config)
    if states is None:
        states = [evolve_spectral(config, t) for t in times]
    per_time = []
    curves = []
    u_grid = np.linspace(-1.1 * fronts.v_e, 1.1 * fronts.v_e, grid_points)
    keep_grid = np.ones(u_grid.size, dtype=bool)
    for t, st in zip(times, states):
        prof = cumulative(st)
        n = prof.sites
        lo = int(-1.2 * fronts.v_e * t)
        sel = (n >= lo) & (n <= -lo)
        n, Phi = n[sel], prof.Phi_mid[sel]
        keep = np.ones(n.size, dtype=bool)
        for f in fronts.fronts:
            half = front_exclusion(f, t, width)
            keep &= np.abs(n - f.velocity * t) >= half
            keep_grid &= np.abs(u_grid - f.velocity) >= half / t
        theory = global_scaling_curve(config, n[keep] / t, fronts)
        per_time.append(float(np.max(np.abs(Phi[keep] - theory))))
        curves.append(np.interp(u_grid, n / t, Phi))
    pair = 0.0
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            pair = max(pair, float(np.max(np.abs(curves[i] - curves[j])[keep_grid])))
    return CollapseReport(times, pair, max(per_time), tuple(per_time))


# staircase --------------------------------------------------------------------

@dataclass(frozen=True)
class StaircaseStep:
    s: int
    h_s: float  # n_f^(1/3) (Phi(n_f) - Phi(n_s))
    h_global: float  # same, measured from the global scaling value at the front
    w_s: float
    area: float
    h_pred: float
    w_pred: float

    @property
    def area_pred(self) -> float:
        return self.h_pred * self.w_pred


@dataclass(frozen=True)
class StaircaseReport:
    front: Front
    time: float
    n_f: int
    alpha_local: float  # |v''(q*)| / |v(q*)|; equals alpha at a maximal front
    z: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    steps: tuple = ()
    requested: int = 0

    @property
    def count(self) -> int:
        return len(self.steps)

    @property
    def complete(self) -> bool:
        return self.count >= self.requested

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.steps])


def airy_square_integral(x: float) -> float:
    """``int_0^x Ai(-y)^2 dy`` via ``d/dy [y Ai^2 - Ai'^2] = Ai^2``."""
    a0, d0 = airy_eval(0.0)
    a, d = airy_eval(-x)
    return (x * a * a + d * d) - d0 * d0


def staircase_predictions(alpha_local: float, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Airy-limit step heights and widths in the scaled variables.

    With ``c = (2 / alpha_local)^(1/3)`` a plateau sits at ``|z| = |a_s| / c``
    and a riser at ``|z| = |a'_s| / c``, giving
    ``h = c int_0^{|a_s|} Ai^2(-y) dy`` and ``w = (|a'_{s+1}| - |a'_s|) / c``.
    The product does not depend on ``alpha_local``.
    """
    if not alpha_local > 0:
        raise ValueError("alpha must be positive")
    c = (2.0 / alpha_local) ** (1.0 / 3.0)
    a, ap = airy_zeros(steps + 1)
    h = np.array([c * airy_square_integral(-z) for z in a[:steps]])
    w = (np.abs(ap[1:steps + 1]) - np.abs(ap[:steps])) / c
    return h, w


def gaussian_smooth(y: np.ndarray, sigma: float) -> np.ndarray:
    if sigma <= 0:
        return y
    half = int(math.ceil(4 * sigma))
    x = np.arange(-half, half + 1)
    ker = np.exp(-0.5 * (x / sigma) ** 2)
    ker /= ker.sum()
    return np.convolve(np.pad(y, half, mode="edge"), ker, mode="valid")


def front_component(state: WaveState, front: Front, band: float = FRONT_BAND,
                    half_width: float = 40.0) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes near a front with all wavevectors farther than ``band`` from ``q*`` removed.

    Separates an internal front from the outer-cone waves that share its sites.
    """
    n_f = front.velocity * state.time
    span = half_width * max(abs(n_f), 1.0) ** (1.0 / 3.0)
    lo = max(int(math.floor(n_f - span)), state.n_min)
    hi = min(int(math.ceil(n_f + span)), state.n_max)
    seg = state.amplitudes[lo - state.n_min: hi - state.n_min + 1]
    spec = np.fft.fft(seg)
    q = 2.0 * math.pi * np.fft.fftfreq(seg.size)
    dist = np.abs(np.angle(np.exp(1j * (q - front.q_star))))
    spec[dist > band] = 0.0
    return np.arange(lo, hi + 1), np.fft.ifft(spec)


def _extrema(y: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Interior local extrema of ``y`` and their parabolic sub-site positions."""
    i = np.arange(1, y.size - 1)
    if kind == "min":
        m = (y[i] < y[i - 1]) & (y[i] <= y[i + 1])
    else:
        m = (y[i] > y[i - 1]) & (y[i] >= y[i + 1])
    idx = i[m]
    a, b, c = y[idx - 1], y[idx], y[idx + 1]
    den = a - 2 * b + c
    off = np.where(den != 0, 0.5 * (a - c) / np.where(den != 0, den, 1.0), 0.0)
    return idx, idx + off


def staircase_extract(state: WaveState, front: Front, steps: int = 5,
                      config: HoppingConfig | None = None, smooth: str | float = "auto",
                      reach: float | None = None) -> StaircaseReport:
    """Locate the Airy staircase behind an order-1 front.

    Plateaus are the local minima of ``p`` (stationary inflexion points of
    ``Phi``), risers the local maxima. Heights use ``n_f = round(v t)`` and
    ``y = n_f^(1/3) (Phi(n_f) - Phi(n))``, mirrored for fronts moving left;
    widths are the scaled distance between the risers on either side of a
    plateau. Internal fronts are first band-filtered around ``q*`` (``smooth``
    ``"auto"``); a number instead applies a Gaussian of that many sites.
    ``reach`` (scaled units behind the front) defaults to a quarter more than
    the predicted position of the last riser needed.
    """
    if front.order != 1:
        raise ValueError(f"staircase needs an order-1 front, got order {front.order}")
    if steps < 1:
        raise ValueError("steps must be positive")
    config = config or state.config
    if config is None:
        raise ValueError("a HoppingConfig is needed")
    t = state.time
    sign = 1 if front.velocity > 0 else -1
    n_f = int(round(abs(front.velocity) * t))
    scale = n_f ** (1.0 / 3.0)
    fronts = find_fronts(config)
    alpha_local = abs(float(omega_derivative(config, front.q_star, 3))) / abs(front.velocity)
    if reach is None:
        last_riser = abs(airy_zeros(steps + 1)[1][-1])
        reach = 1.25 * (alpha_local / 2.0) ** (1.0 / 3.0) * last_riser + 1.0

    # work on the right-moving picture: site m = sign * n
    p_full = state.probabilities
    sites = state.sites
    if sign < 0:
        p_full, sites = p_full[::-1], -sites[::-1]
    cum = np.cumsum(p_full)
    lo = int(math.floor(n_f - reach * scale))
    hi = int(math.ceil(n_f + 2.0 * scale))
    if lo < sites[0] + 1 or hi > sites[-1] - 1:
        raise ValueError("state window does not cover the front region")
    i0 = lo - sites[0]
    window = np.arange(lo, hi + 1)
    p = p_full[i0: i0 + window.size]

    if smooth == "auto":
        smooth = "band" if front.kind == "internal" else 0.0
    if smooth == "band":
        n_band, amp = front_component(state, front, half_width=reach + 10.0)
        pb = np.abs(amp) ** 2
        if sign < 0:
            n_band, pb = -n_band[::-1], pb[::-1]
        p_locate = np.interp(window, n_band, pb)
    else:
        p_locate = gaussian_smooth(p, float(smooth))

    phi_f = cum[n_f - sites[0]]
    z = (window - n_f) / scale
    y = scale * (phi_f - cum[i0: i0 + window.size])

    h_pred, w_pred = staircase_predictions(alpha_local, steps)
    # global-curve value at the front, in the mirrored picture for left movers
    phi_front_global = global_scaling_curve(config, front.velocity, fronts)
    if sign < 0:
        phi_front_global = 1.0 - phi_front_global

    imin, _ = _extrema(p_locate, "min")
    imax, fmax = _extrema(p_locate, "max")
    # keep extrema behind the front (plateaus) and up to ~the main peak (risers)
    behind = window[imin] <= n_f
    imin = imin[behind][::-1]
    rmask = window[imax] <= n_f + 1.5 * scale
    imax, fmax = imax[rmask][::-1], fmax[rmask][::-1]

    out = []
    for s in range(1, steps + 1):
        if s > imin.size or s + 1 > fmax.size:
            break
        k = imin[s - 1]
        # plateaus must be near-stationary relative to the neighbouring risers
        if p_locate[k] > 0.1 * min(p_locate[imax[s - 1]], p_locate[imax[s]]):
            break
        h = float(y[k])
        hg = float(scale * (phi_front_global - cum[i0 + k]))
        w = float((fmax[s - 1] - fmax[s]) / scale)
        out.append(StaircaseStep(s, h, hg, w, h * w, float(h_pred[s - 1]), float(w_pred[s - 1])))
    return StaircaseReport(front, t, sign * n_f, alpha_local, z * sign, y, tuple(out), steps)


# critical front ------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalProfile:
    time: float
    x: np.ndarray = field(repr=False)  # n / t^(1/4)
    y: np.ndarray = field(repr=False)  # t^(1/4) (1/2 - Phi_mid(n))
    slope: float  # fitted C in y ~ -C x near the origin
    antisymmetry: float
    stationary_inflexions: tuple  # x positions off the origin; empty for a single sharp step


def critical_front_profile(t: float, reach: float = 8.0, config: HoppingConfig | None = None,
                           state: WaveState | None = None) -> CriticalProfile:
    """Scaled deviation ``t^(1/4) dPhi`` against ``n / t^(1/4)`` near the order-2 front at the origin."""
    config = config or HoppingConfig.from_g(0.25)
    fronts = find_fronts(config)
    if fronts.regime != "critical":
        raise ValueError("the critical profile needs g = 1/4")
    state = state or evolve_spectral(config, t)
    prof = cumulative(state)
    s4 = t ** 0.25
    half = int(math.ceil(reach * s4))
    n = np.arange(-half, half + 1)
    y = s4 * (0.5 - prof.at(n, midpoint=True))
    x = n / s4
    anti = float(np.max(np.abs(y + y[::-1])))
    small = np.abs(x) <= 0.5
    slope = -float(np.polyfit(x[small], y[small], 1)[0])
    # a stationary inflexion is a local minimum of the (smoothed) slope p that
    # drops below a tenth of the neighbouring maxima
    dens = gaussian_smooth(state.p(n) * s4 * s4, 2.0)
    imin, _ = _extrema(dens, "min")
    imax, _ = _extrema(dens, "max")
    flat = []
    for k in imin:
        if abs(x[k]) < 1e-12:
            continue
        left = imax[imax < k]
        right = imax[imax > k]
        ref = min(dens[left[-1]] if left.size else dens[0], dens[right[0]] if right.size else dens[-1])
        if dens[k] < 0.1 * ref:
            flat.append(float(x[k]))
    return CriticalProfile(float(t), x, y, slope, anti, tuple(flat))


def critical_collapse(profiles) -> float:
    """Largest relative gap between scaled critical profiles on their common ``x`` range."""
    profiles = list(profiles)
    ref = profiles[-1]
    worst = 0.0
    for prof in profiles[:-1]:
        lo = max(prof.x[0], ref.x[0])
        hi = min(prof.x[-1], ref.x[-1])
        xs = ref.x[(ref.x >= lo) & (ref.x <= hi)]
        a = np.interp(xs, prof.x, prof.y)
        b = np.interp(xs, ref.x, ref.y)
        worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
    return worst
