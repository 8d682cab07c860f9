"""Intervals of the real line as metric spaces, plus sampling-based sanity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .expr import DomainError, RealMap

__all__ = [
    "Domain",
    "MetricSpace",
    "MapProperties",
    "AxiomReport",
    "InjectivityReport",
    "sample_points",
    "check_metric_axioms",
    "sanity_check_injectivity",
    "MERGE_TOL",
]

MERGE_TOL = 1e-9
DEFAULT_SPAN = 10.0


@dataclass(frozen=True)
class Domain:
    lower: float
    upper: float = math.inf
    lower_closed: bool = True
    upper_closed: bool = False

    def __post_init__(self):
        if not math.isfinite(self.lower):
            raise ValueError("domain lower bound must be finite")
        if math.isnan(self.upper) or not self.lower < self.upper:
            raise ValueError(f"domain needs lower < upper, got [{self.lower}, {self.upper}]")
        if math.isinf(self.upper) and self.upper_closed:
            raise ValueError("an infinite upper bound cannot be closed")

    def __contains__(self, x: float) -> bool:
        if not math.isfinite(x):
            return False
        lo_ok = x >= self.lower if self.lower_closed else x > self.lower
        hi_ok = x <= self.upper if self.upper_closed else x < self.upper
        return lo_ok and hi_ok

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.upper)

    def sampling_window(self, span: float) -> tuple[float, float]:
        """Finite [lo, hi] used for sampling; unbounded domains are cut at lower + span."""
        hi = self.upper if self.bounded else self.lower + span
        return self.lower, hi

    def clamp_inside(self, x: float) -> float:
        """Nudge ``x`` into the domain if it sits on an open endpoint or just outside."""
        if x in self:
            return x
        lo, hi = self.lower, self.upper
        if x <= lo:
            x = lo if self.lower_closed else math.nextafter(lo, math.inf)
        elif x >= hi:
            x = hi if self.upper_closed else math.nextafter(hi, -math.inf)
        return x

    def __str__(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        hi = "+inf" if math.isinf(self.upper) else f"{self.upper:g}"
        return f"{left}{self.lower:g}, {hi}{right}"


@dataclass(frozen=True)
class MetricSpace:
    """A real interval with either |x - y| or ``g(|x - y|)`` as distance."""

    domain: Domain
    metric: RealMap | None = None  # None means euclidean
    span: float = DEFAULT_SPAN
    seed: int = 0

    def __post_init__(self):
        if not (self.span > 0 and math.isfinite(self.span)):
            raise ValueError("span must be a positive real")

    @property
    def metric_name(self) -> str:
        return "euclidean" if self.metric is None else self.metric.source

    @property
    def is_euclidean(self) -> bool:
        return self.metric is None

    def distance(self, x: float, y: float) -> float:
        gap = abs(x - y)
        if self.metric is None:
            return gap
        return self.metric(gap)

    __call__ = distance

    def window(self) -> tuple[float, float]:
        return self.domain.sampling_window(self.span)


@dataclass(frozen=True)
class MapProperties:
    """Declared (not verified) properties of the auxiliary map T."""

    one_to_one: bool = False
    continuous: bool = False
    sequentially_convergent: bool = False
    subsequentially_convergent: bool = False

    def __post_init__(self):
        if self.sequentially_convergent and not self.subsequentially_convergent:
            raise ValueError("a sequentially convergent map is also subsequentially convergent")

    @classmethod
    def identity(cls) -> "MapProperties":
        return cls(True, True, True, True)

    @property
    def theorem_hypotheses_declared(self) -> bool:
        return self.one_to_one and self.continuous and self.subsequentially_convergent


def sample_points(space: MetricSpace, n: int, seed: int, span: float | None = None) -> list[float]:
    """``n`` points of the domain: one jittered point per cell of a uniform grid."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return []
    lo, hi = space.domain.sampling_window(space.span if span is None else span)
    rng = np.random.default_rng(seed)
    jitter = rng.random(n)
    width = (hi - lo) / n
    pts = lo + (np.arange(n) + jitter) * width
    return [space.domain.clamp_inside(float(p)) for p in pts]


@dataclass(frozen=True)
class AxiomReport:
    status: str  # pass | fail | untested
    points: int
    triples: int
    axiom: str | None = None
    witness: tuple[float, ...] | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def check_metric_axioms(
    space: MetricSpace, n: int, seed: int, rel_tol: float = 1e-12
) -> AxiomReport:
    """Identity, symmetry and triangle inequality on ``n`` sampled points."""
    pts = sample_points(space, n, seed)
    if not pts:
        return AxiomReport("untested", 0, 0, detail="no points sampled; vacuous pass")
    d = np.empty((n, n))
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            d[i, j] = space.distance(x, y)
    scale = max(1.0, float(np.max(np.abs(d))))
    tol = rel_tol * scale
    for i, x in enumerate(pts):
        if d[i, i] != 0.0:
            return AxiomReport("fail", n, 0, "identity", (x,), f"d(x,x) = {d[i, i]!r}")
    bad = np.argwhere(d < 0)
    if bad.size:
        i, j = bad[0]
        return AxiomReport("fail", n, 0, "nonnegativity", (pts[i], pts[j]), f"d = {d[i, j]!r}")
    for i in range(n):
        for j in range(n):
            if i != j and pts[i] != pts[j] and d[i, j] <= 0.0:
                return AxiomReport("fail", n, 0, "identity", (pts[i], pts[j]), "d(x,y) = 0 with x != y")
    asym = np.argwhere(np.abs(d - d.T) > tol)
    if asym.size:
        i, j = asym[0]
        return AxiomReport("fail", n, 0, "symmetry", (pts[i], pts[j]), f"{d[i, j]!r} != {d[j, i]!r}")
    # d(x,z) <= d(x,y) + d(y,z) for every triple, scanned one middle point at a time
    for j in range(n):
        slack = d[:, j][:, None] + d[j, :][None, :] - d
        viol = np.argwhere(slack < -tol)
        if viol.size:
            i, k = viol[0]
            x, y, z = pts[i], pts[j], pts[k]
            return AxiomReport(
                "fail", n, n**3, "triangle", (x, y, z),
                f"d(x,z) = {d[i, k]!r} > d(x,y) + d(y,z) = {d[i, j] + d[j, k]!r}",
            )
    return AxiomReport("pass", n, n**3)


@dataclass(frozen=True)
class InjectivityReport:
    passed: bool
    points: int
    witness: tuple[float, float] | None = None
    detail: str = ""


def sanity_check_injectivity(
    T: RealMap, space: MetricSpace, n: int, seed: int, merge_tol: float = MERGE_TOL
) -> InjectivityReport:
    """Look for x != y with T(x) == T(y) (within ``merge_tol``) on sampled points.

    Besides direct collisions, a sign change in the slope of T between
    neighbouring samples is chased down with a root finder to an explicit pair
    of distinct points sharing a T-value. A pass is evidence, not proof.
    """
    pts = sorted(set(sample_points(space, n, seed)))
    if T.is_identity or len(pts) < 2:
        return InjectivityReport(True, len(pts))
    vals = [T(x) for x in pts]

    order = sorted(range(len(pts)), key=lambda i: (vals[i], pts[i]))
    for a, b in zip(order, order[1:]):
        x, y = pts[a], pts[b]
        if space.distance(x, y) > merge_tol and abs(vals[a] - vals[b]) <= merge_tol:
            return InjectivityReport(False, len(pts), (min(x, y), max(x, y)), "sampled collision")

    for j in range(1, len(pts) - 1):
        left, right = vals[j - 1] - vals[j], vals[j + 1] - vals[j]
        if left * right <= 0:
            continue
        # vals[j] is a strict local extremum; match the nearer neighbour's level
        # on the far side of the extremum.
        if abs(left) <= abs(right):
            x0, level, a, b = pts[j - 1], vals[j - 1], pts[j], pts[j + 1]
        else:
            x0, level, a, b = pts[j + 1], vals[j + 1], pts[j - 1], pts[j]
        x1 = _match_level(T, level, a, b)
        if x1 is None:
            continue
        if space.distance(x0, x1) > merge_tol and abs(T(x1) - level) <= merge_tol:
            return InjectivityReport(
                False, len(pts), (min(x0, x1), max(x0, x1)), "level-set pair around a local extremum"
            )
    return InjectivityReport(True, len(pts))


def _match_level(T: Callable[[float], float], level: float, a: float, b: float) -> float | None:
    try:
        fa, fb = T(a) - level, T(b) - level
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb > 0:
            return None
        return brentq(lambda t: T(t) - level, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except (DomainError, ValueError):
        return None
