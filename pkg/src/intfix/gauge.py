"""Integrand gauges and their cumulative integrals F(u) = int_0^u phi(t) dt."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .expr import DomainError, RealMap

__all__ = [
    "GaugeError",
    "QuadratureError",
    "Gauge",
    "CumulativeIntegral",
    "PositivityReport",
    "integrate",
    "integrate_between",
    "adaptive_simpson",
    "check_positivity",
    "default_epsilons",
    "POSITIVITY_FLOOR",
]

POSITIVITY_FLOOR = 1e-14
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_MAX_DEPTH = 50
# Subdivision levels forced before the error estimate is trusted; guards
# against a 5-point Simpson sample that happens to miss all of phi's mass.
MIN_DEPTH = 3

# Construction-time nonnegativity probe: 0, a log grid, and a linear grid.
_PROBE_T = np.unique(np.concatenate([[0.0], np.logspace(-8, 3, 45), np.linspace(0.0, 100.0, 201)]))


class GaugeError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Gauge:
    phi: RealMap
    breakpoints: tuple[float, ...] = ()
    quad_tol: float = DEFAULT_QUAD_TOL
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if any(not math.isfinite(b) or b < 0 for b in bps):
            raise GaugeError("breakpoints must be finite and nonnegative")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise GaugeError("breakpoints must be strictly increasing")
        if not (self.quad_tol > 0 and math.isfinite(self.quad_tol)):
            raise GaugeError("quad_tol must be a positive real")
        if self.max_depth < 1:
            raise GaugeError("max_depth must be >= 1")
        # phi's value exactly at a breakpoint is irrelevant; probe both one-sided limits
        sides = [math.nextafter(b, -math.inf) for b in bps if b > 0] + [math.nextafter(b, math.inf) for b in bps]
        probes = [t for t in np.unique(np.concatenate([_PROBE_T, sides])) if t not in bps]
        for t in probes:
            try:
                v = self.phi(float(t))
            except DomainError as exc:
                raise GaugeError(f"phi is undefined at t={t:g}: {exc.message}") from exc
            if v < 0:
                raise GaugeError(f"phi is negative at t={t:g} (phi={v:g})")

    @classmethod
    def constant(cls, value: float = 1.0, **kwargs) -> "Gauge":
        return cls(RealMap.parse(repr(float(value))), **kwargs)

    @classmethod
    def from_source(cls, source: str, **kwargs) -> "Gauge":
        return cls(RealMap.parse(source), **kwargs)

    def __call__(self, t: float) -> float:
        return self.phi(t)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    max_depth: int = DEFAULT_MAX_DEPTH,
    fa: float | None = None,
    fb: float | None = None,
    min_depth: int = MIN_DEPTH,
) -> float:
    """Adaptive Simpson's rule on [a, b] with absolute tolerance ``tol``.

    ``fa``/``fb`` override the endpoint values, which lets callers supply
    one-sided limits at a jump. Raises QuadratureError if refinement hits
    ``max_depth`` without meeting the tolerance.
    """
    if b == a:
        return 0.0
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, max_depth, min_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth, max_depth, min_depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth >= min_depth and abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth >= max_depth:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a:g}, {b:g}] within depth {max_depth}"
        )
    half = 0.5 * tol
    return _simpson_rec(f, a, m, fa, flm, fm, left, half, depth + 1, max_depth, min_depth) + _simpson_rec(
        f, m, b, fm, frm, fb, right, half, depth + 1, max_depth, min_depth
    )


def _checked(gauge: Gauge) -> Callable[[float], float]:
    phi = gauge.phi

    def f(t: float) -> float:
        try:
            v = phi(t)
        except DomainError as exc:
            raise QuadratureError(f"phi undefined at t={t:g}: {exc.message}") from exc
        if v < 0:
            raise QuadratureError(f"phi is negative at t={t:g}")
        return v

    return f


def integrate_between(gauge: Gauge, lower: float, upper: float) -> float:
    """int_lower^upper phi(t) dt for 0 <= lower <= upper, split at breakpoints."""
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise QuadratureError("integration limits must be finite")
    if lower < 0 or upper < lower:
        raise QuadratureError(f"need 0 <= lower <= upper, got [{lower:g}, {upper:g}]")
    if upper == lower:
        return 0.0
    f = _checked(gauge)
    cuts = [lower, *(b for b in gauge.breakpoints if lower < b < upper), upper]
    total_len = upper - lower
    total = 0.0
    bps = set(gauge.breakpoints)
    for a, b in zip(cuts, cuts[1:]):
        # one-sided limits at breakpoints
        fa = f(math.nextafter(a, math.inf)) if a in bps else None
        fb = f(math.nextafter(b, -math.inf)) if b in bps else None
        piece_tol = gauge.quad_tol * (b - a) / total_len
        total += adaptive_simpson(f, a, b, piece_tol, gauge.max_depth, fa, fb)
    return max(total, 0.0)


def integrate(gauge: Gauge, upper: float) -> float:
    """F(upper) = int_0^upper phi(t) dt."""
    return integrate_between(gauge, 0.0, upper)


class CumulativeIntegral:
    """Memoized F(u) for one gauge.

    The cache only stores exact (u, F(u)) results, so lookups are
    indistinguishable from recomputation; it is safe for concurrent readers.
    """

    def __init__(self, gauge: Gauge, maxsize: int = 1 << 16):
        self.gauge = gauge
        self.maxsize = maxsize
        self._cache: dict[float, float] = {}
        self._lock = threading.Lock()

    def __call__(self, u: float) -> float:
        u = float(u)
        hit = self._cache.get(u)
        if hit is not None:
            return hit
        value = integrate(self.gauge, u)
        with self._lock:
            if len(self._cache) >= self.maxsize:
                self._cache.clear()
            self._cache[u] = value
        return value

    def table(self) -> list[tuple[float, float]]:
        with self._lock:
            return sorted(self._cache.items())


@dataclass(frozen=True)
class PositivityReport:
    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    floor: float
    failing: tuple[float, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.failing

    @property
    def checked(self) -> int:
        return len(self.epsilons)


def default_epsilons(diameter: float, count: int = 25) -> list[float]:
    """Log-spaced grid from 1e-8 up to ``diameter``."""
    top = max(float(diameter), 1e-8)
    if top <= 1e-8:
        return [1e-8]
    return [float(v) for v in np.geomspace(1e-8, top, count)]


def check_positivity(
    gauge: Gauge, epsilons: Iterable[float], floor: float = POSITIVITY_FLOOR
) -> PositivityReport:
    eps = tuple(float(e) for e in epsilons)
    if any(not (e > 0) for e in eps):
        raise ValueError("all epsilons must be positive")
    values = tuple(integrate(gauge, e) for e in eps)
    failing = tuple(e for e, v in zip(eps, values) if not v > floor)
    return PositivityReport(eps, values, floor, failing)

