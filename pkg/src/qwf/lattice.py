"""Hopping configuration and the lattice dispersion relation.

Energies are in units of the nearest-neighbour coupling, lengths in lattice
spacings, so ``couplings[0]`` is always exactly one.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

_TWO_PI = 2.0 * math.pi
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MAX_ORDER = 4


@dataclass(frozen=True)
class HoppingConfig:
    """Hopping amplitudes ``g_J`` for ``J = 1..M``, with ``g_1 = 1``."""

    couplings: tuple[float, ...]

    def __post_init__(self):
        couplings = tuple(float(c) for c in self.couplings)
        if len(couplings) < 1:
            raise ValueError("at least the nearest-neighbour coupling is required")
        if not all(math.isfinite(c) for c in couplings):
            raise ValueError(f"couplings must be finite, got {couplings}")
        if couplings[0] != 1.0:
            raise ValueError(
                f"couplings[0] is the energy unit and must be exactly 1, got {couplings[0]}"
            )
        object.__setattr__(self, "couplings", couplings)

    @classmethod
    def from_g(cls, g: float) -> "HoppingConfig":
        """Nearest plus next-nearest neighbour walk with ratio ``g = g_2/g_1``."""
        return cls((1.0, float(g)))

    @property
    def M(self) -> int:
        return len(self.couplings)

    @property
    def g(self) -> float:
        """Next-nearest neighbour ratio (0 for a pure nearest-neighbour walk)."""
        return self.couplings[1] if self.M >= 2 else 0.0

    @property
    def is_nearest_neighbour(self) -> bool:
        return all(c == 0.0 for c in self.couplings[1:])

    @property
    def bandwidth(self) -> float:
        """``sum_J 2|g_J|``, an upper bound on ``|w(q)|``."""
        return sum(2.0 * abs(c) for c in self.couplings)


def reduce_wavevector(q):
    """Map ``q`` into the first Brillouin zone ``(-pi, pi]``."""
    q = np.asarray(q, dtype=float)
    r = np.remainder(q + math.pi, _TWO_PI) - math.pi
    r = np.where(r <= -math.pi, math.pi, r)
    return r if r.ndim else float(r)


def _trig_derivative(x, m: int):
    # d^m/dx^m cos(x), written out so that no phase shift enters the argument
    k = m % 4
    if k == 0:
        return np.cos(x)
    if k == 1:
        return -np.sin(x)
    if k == 2:
        return -np.cos(x)
    return np.sin(x)


def omega_derivative(config: HoppingConfig, q, m: int):
    """m-th derivative of ``w(q) = sum_J 2 g_J cos(J q)``, any ``m >= 0``.

    Used internally by the front classifier, which may need orders above 4.
    """
    q = reduce_wavevector(q)
    total = np.zeros_like(np.asarray(q, dtype=float))
    for J, gJ in enumerate(config.couplings, start=1):
        if gJ == 0.0:
            continue
        total = total + 2.0 * gJ * float(J) ** m * _trig_derivative(J * np.asarray(q), m)
    return total if np.ndim(total) else float(total)


def dispersion_eval(config: HoppingConfig, q, order: int = 0):
    """Dispersion ``w(q)`` (order 0) or its analytic derivative of order 1..4.

    Order 1 is the group velocity ``v(q)``.
    """
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise ValueError(f"derivative order must be an integer in 0..{MAX_ORDER}, got {order!r}")
    return omega_derivative(config, q, int(order))


def group_velocity(config: HoppingConfig, q):
    return omega_derivative(config, q, 1)


@dataclass(frozen=True)
class Dispersion:
    """Bound evaluator for ``w`` and its derivatives."""

    config: HoppingConfig

    def __call__(self, q, order: int = 0):
        return dispersion_eval(self.config, q, order)

    def velocity(self, q):
        return omega_derivative(self.config, q, 1)

    def derivative(self, q, m: int):
        return omega_derivative(self.config, q, m)


def golden_section_max(f, a: float, b: float, tol: float = 1e-14) -> float:
    """Maximiser of a unimodal ``f`` on ``[a, b]``."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a <= 4 * np.spacing(max(abs(a), abs(b))):
            break
    return 0.5 * (a + b)


def group_velocity_extent(config: HoppingConfig, scan_points: int = 4096) -> tuple[float, float]:
    """Maximal group velocity ``v_e = max |v(q)|`` and its wavevector ``q_e`` in ``(0, pi]``.

    A uniform scan brackets the global maximum, golden-section refines it.
    ``v`` is odd, so scanning ``[0, pi]`` covers the zone.
    """
    grid = np.linspace(0.0, math.pi, scan_points + 1)
    speed = np.abs(group_velocity(config, grid))
    i = int(np.argmax(speed))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, scan_points)]

    def f(q):
        return abs(float(group_velocity(config, q)))

    q_e = golden_section_max(f, lo, hi)
    # endpoints of the bracket may beat the interior estimate
    candidates = [(f(q), q) for q in (q_e, lo, hi) if q > 0.0]
    v_e, q_e = max(candidates)
    return v_e, q_e


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; values are Python/TOML-style literals."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError) as exc:
            raise ValueError(f"line {lineno}: cannot parse value {value!r}") from exc
    return out


def load_config(path: str | Path) -> HoppingConfig:
    """Read a ``couplings = [1.0, 0.5]`` style file into a HoppingConfig."""
    values = parse_config_text(Path(path).read_text())
    if "couplings" not in values:
        raise ValueError(f"{path}: missing 'couplings' entry")
    couplings = values["couplings"]
    if not isinstance(couplings, (list, tuple)):
        raise ValueError(f"{path}: 'couplings' must be a list")
    return HoppingConfig(tuple(couplings))


def config_from_args(g: float | None = None, couplings: Sequence[float] | None = None) -> HoppingConfig:
    if couplings is not None:
        return HoppingConfig(tuple(couplings))
    return HoppingConfig.from_g(0.0 if g is None else g)
