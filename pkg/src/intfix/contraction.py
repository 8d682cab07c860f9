"""Integral-type contractive conditions: evaluation, certification, falsification.

Three condition presets compare ``F(lhs) <= k * F(rhs)`` where ``F`` is the
cumulative integral of the gauge:

============  ===================  ==========================
preset        lhs distance         rhs distance
============  ===================  ==========================
branciari     d(Sx, Sy)            d(x, y)
rhoades       d(Sx, Sy)            m(x, y)
moradi        d(TSx, TSy)          m'(Tx, Ty)
============  ===================  ==========================

Every verdict here is sampled evidence over finitely many pairs, never a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterable

import numpy as np

from .expr import DomainError, RealMap
from .gauge import POSITIVITY_FLOOR, QuadratureError
from .space import sample_points

if TYPE_CHECKING:
    from .problem import Problem

__all__ = [
    "CERT_TOL",
    "PRESET_KINDS",
    "ConditionPreset",
    "PairEvaluation",
    "Certificate",
    "CertificationError",
    "FalsifyResult",
    "m_max",
    "m_prime",
    "evaluate_pair",
    "candidate_pairs",
    "near_fixed_points",
    "certify",
    "falsify",
    "golden_section_max",
]

CERT_TOL = 1e-9
PRESET_KINDS = ("branciari", "rhoades", "moradi")
MPRIME_READING = "m'(Tx,Ty): maximal term evaluated on T-images, so lhs d(TSx,TSy) is compared against it"

Metric = Callable[[float, float], float]


@dataclass(frozen=True)
class ConditionPreset:
    kind: str
    k: float
    T: RealMap = field(default_factory=RealMap.identity)

    def __post_init__(self):
        if self.kind not in PRESET_KINDS:
            raise ValueError(f"unknown preset {self.kind!r}; expected one of {PRESET_KINDS}")
        if not (isinstance(self.k, (int, float)) and 0.0 <= self.k < 1.0):
            raise ValueError(f"k must lie in [0,1), got {self.k!r}")
        if self.kind != "moradi" and not self.T.is_identity:
            raise ValueError(f"preset {self.kind!r} requires the identity T")


@dataclass(frozen=True)
class PairEvaluation:
    x: float
    y: float
    lhs_upper: float
    rhs_upper: float
    lhs_integral: float
    rhs_integral: float
    ratio: float | None

    def violates(self, k: float, cert_tol: float = CERT_TOL) -> bool:
        return self.lhs_integral > k * self.rhs_integral + cert_tol

    def excess(self, k: float) -> float:
        return self.lhs_integral - k * self.rhs_integral


def m_max(x: float, y: float, S: RealMap, d: Metric) -> float:
    sx, sy = S(x), S(y)
    return max(d(x, y), d(x, sx), d(y, sy), (d(x, sy) + d(y, sx)) / 2)


def m_prime(x: float, y: float, S: RealMap, T: RealMap, d: Metric) -> float:
    tx, ty = T(x), T(y)
    tsx, tsy = T(S(x)), T(S(y))
    return max(d(tx, ty), d(tx, tsx), d(ty, tsy), (d(tx, tsy) + d(ty, tsx)) / 2)


def _image(S: RealMap, x: float, problem: "Problem") -> float:
    sx = S(x)
    if sx not in problem.space.domain:
        raise DomainError(f"S({x!r}) = {sx!r} leaves the domain {problem.space.domain}", 0)
    return sx


def evaluate_pair(problem: "Problem", x: float, y: float) -> PairEvaluation:
    dom = problem.space.domain
    for p in (x, y):
        if p not in dom:
            raise DomainError(f"point {p!r} is outside the domain {dom}", 0)
    d = problem.space.distance
    S, F = problem.S, problem.cumulative
    sx, sy = _image(S, x, problem), _image(S, y, problem)
    kind = problem.preset.kind
    if kind == "moradi":
        T = problem.T
        tx, ty, tsx, tsy = T(x), T(y), T(sx), T(sy)
        lhs = d(tsx, tsy)
        rhs = max(d(tx, ty), d(tx, tsx), d(ty, tsy), (d(tx, tsy) + d(ty, tsx)) / 2)
    else:
        lhs = d(sx, sy)
        if kind == "rhoades":
            rhs = max(d(x, y), d(x, sx), d(y, sy), (d(x, sy) + d(y, sx)) / 2)
        else:
            rhs = d(x, y)
    lhs_int, rhs_int = F(lhs), F(rhs)
    ratio = lhs_int / rhs_int if rhs_int > POSITIVITY_FLOOR else None
    return PairEvaluation(x, y, lhs, rhs, lhs_int, rhs_int, ratio)


# --- certification -----------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    verdict: str  # certified-at-k | falsified | inconclusive
    kind: str
    k: float
    estimated_k: float | None
    witness_best: PairEvaluation | None
    witness_violation: PairEvaluation | None
    pairs_checked: int
    pairs_defined: int
    violations: int
    seed: int
    cert_tol: float = CERT_TOL
    evidence: str = "sampled"
    interpretation: str | None = None


class CertificationError(RuntimeError):
    """Evaluation failed mid-certification; ``partial`` covers pairs done so far."""

    def __init__(self, message: str, partial: Certificate, pair: tuple[float, float]):
        super().__init__(message)
        self.partial = partial
        self.pair = pair


def near_fixed_points(problem: "Problem", starts: Iterable[float], steps: int = 200) -> list[float]:
    """Approximate fixed points of S reached by short Picard runs from ``starts``."""
    S, dom = problem.S, problem.space.domain
    found: list[float] = []
    for x in starts:
        try:
            for _ in range(steps):
                nx = S(x)
                if nx not in dom or abs(nx) > 1e12:
                    break
                if nx == x:
                    break
                x = nx
            if x in dom and abs(S(x) - x) <= 1e-6 * (1.0 + abs(x)):
                found.append(x)
        except DomainError:
            continue
    out: list[float] = []
    for x in sorted(found):
        if not out or abs(x - out[-1]) > 1e-9 * (1.0 + abs(x)):
            out.append(x)
    return out


def candidate_pairs(problem: "Problem", n_pairs: int, seed: int) -> list[tuple[float, float]]:
    """Deterministic pair set mixing grid, random, fixed-point, near-diagonal and boundary pairs.

    The supremum ratio is often attained on a thin set (one point at the fixed
    point, say), which uniform sampling alone would miss.
    """
    space = problem.space
    dom = space.domain
    lo, hi = space.window()
    width = hi - lo
    rng = np.random.default_rng(seed)

    m = math.isqrt(max(n_pairs, 1)) + 2
    grid = sample_points(space, m, seed)
    pairs: list[tuple[float, float]] = []
    pairs += [(grid[i], grid[j]) for i in range(m) for j in range(i + 1, m)]

    n_rand = max(n_pairs // 4, 1)
    xs = rng.uniform(lo, hi, size=(n_rand, 2))
    pairs += [(dom.clamp_inside(float(a)), dom.clamp_inside(float(b))) for a, b in xs]

    starts = [grid[0], grid[m // 2], grid[-1]]
    for fp in near_fixed_points(problem, starts):
        pairs += [(fp, g) for g in grid]

    n_diag = max(n_pairs // 8, 1)
    base = rng.uniform(lo, hi, size=n_diag)
    # gaps well above rounding noise so ratios stay trustworthy
    gaps = width * 10.0 ** rng.uniform(-4.0, -1.0, size=n_diag)
    for b, g in zip(base, gaps):
        a = dom.clamp_inside(float(b))
        pairs.append((a, dom.clamp_inside(a + float(g))))

    edges = [dom.clamp_inside(lo)]
    if dom.bounded:
        edges.append(dom.clamp_inside(hi))
    for e in edges:
        pairs += [(e, g) for g in grid]

    seen: dict[tuple[float, float], None] = {}
    for a, b in pairs:
        key = (a, b) if a <= b else (b, a)
        if key[0] != key[1]:
            seen.setdefault(key, None)
    while len(seen) < n_pairs:
        a, b = (dom.clamp_inside(float(v)) for v in rng.uniform(lo, hi, size=2))
        if a != b:
            seen.setdefault((min(a, b), max(a, b)), None)
    return list(seen)


def _best_key(pe: PairEvaluation):
    return (-pe.ratio, pe.x, pe.y)


def _summarize(problem, evals, seed, cert_tol, checked) -> Certificate:
    k = problem.preset.k
    defined = [pe for pe in evals if pe.ratio is not None]
    violators = [pe for pe in evals if pe.violates(k, cert_tol)]
    best = min(defined, key=_best_key) if defined else None
    worst = min(violators, key=lambda pe: (-pe.excess(k), pe.x, pe.y)) if violators else None
    if violators:
        verdict = "falsified"
    elif not defined:
        verdict = "inconclusive"
    elif best.ratio <= k + cert_tol:
        verdict = "certified-at-k"
    else:
        verdict = "inconclusive"
    return Certificate(
        verdict=verdict,
        kind=problem.preset.kind,
        k=k,
        estimated_k=best.ratio if best else None,
        witness_best=best,
        witness_violation=worst,
        pairs_checked=checked,
        pairs_defined=len(defined),
        violations=len(violators),
        seed=seed,
        cert_tol=cert_tol,
        interpretation=MPRIME_READING if problem.preset.kind == "moradi" else None,
    )


def certify(problem: "Problem", n_pairs: int, seed: int, cert_tol: float = CERT_TOL) -> Certificate:
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    pairs = candidate_pairs(problem, n_pairs, seed)
    evals: list[PairEvaluation] = []
    for x, y in pairs:
        try:
            evals.append(evaluate_pair(problem, x, y))
        except (DomainError, QuadratureError) as exc:
            partial = _summarize(problem, evals, seed, cert_tol, len(evals))
            raise CertificationError(f"evaluation failed at ({x!r}, {y!r}): {exc}", partial, (x, y)) from exc
    return _summarize(problem, evals, seed, cert_tol, len(evals))


# --- falsification -----------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float, iters: int) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on [a, b].

    Returns the best (argument, value) seen, which for non-unimodal ``f`` is
    still a valid lower bound on the maximum.
    """
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
    return best


@dataclass(frozen=True)
class FalsifyResult:
    found: bool
    witness: PairEvaluation | None  # the violating pair, or the best pair seen
    k: float
    evaluations: int
    skipped: int
    restarts: int
    seed: int

    @property
    def ratio(self) -> float | None:
        return None if self.witness is None else self.witness.ratio


class _Budget(Exception):
    pass


def falsify(
    problem: "Problem",
    budget: int,
    seed: int,
    restarts: int = 64,
    sweeps: int = 6,
    line_iters: int = 14,
    cert_tol: float = CERT_TOL,
) -> FalsifyResult:
    """Maximize the ratio by random restarts plus alternating golden-section line searches.

    Stops after the first restart that produces a violation (that restart's
    refinement is completed, so the witness is locally maximal) or when
    ``budget`` pair evaluations are spent.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    k = problem.preset.k
    dom = problem.space.domain
    lo, hi = problem.space.window()
    min_gap = 1e-7 * (hi - lo)
    rng = np.random.default_rng(seed)
    state = {"evals": 0, "skipped": 0}
    best: list[PairEvaluation | None] = [None]
    violation: list[PairEvaluation | None] = [None]

    def score(x: float, y: float) -> float:
        if state["evals"] >= budget:
            raise _Budget
        state["evals"] += 1
        x, y = dom.clamp_inside(x), dom.clamp_inside(y)
        if abs(x - y) < min_gap:
            return -math.inf
        try:
            pe = evaluate_pair(problem, min(x, y), max(x, y))
        except (DomainError, QuadratureError):
            state["skipped"] += 1
            return -math.inf
        if pe.ratio is None:
            return -math.inf
        cur = best[0]
        if cur is None or _best_key(pe) < _best_key(cur):
            best[0] = pe
        if pe.violates(k, cert_tol):
            cur_v = violation[0]
            if cur_v is None or pe.ratio > (cur_v.ratio or -math.inf):
                violation[0] = pe
        return pe.ratio

    done = 0
    try:
        for r in range(restarts):
            done = r + 1
            x, y = (float(v) for v in rng.uniform(lo, hi, size=2))
            if r % 4 == 0:
                x = lo
            fx = score(x, y)
            w = 0.5 * (hi - lo)
            for _ in range(sweeps):
                improved = False
                for axis in (0, 1):
                    c = x if axis == 0 else y
                    a, b = max(lo, c - w), min(hi, c + w)
                    if axis == 0:
                        arg, val = golden_section_max(lambda t: score(t, y), a, b, line_iters)
                    else:
                        arg, val = golden_section_max(lambda t: score(x, t), a, b, line_iters)
                    if val > fx:
                        improved = improved or val > fx + 1e-12
                        fx = val
                        if axis == 0:
                            x = arg
                        else:
                            y = arg
                w *= 0.25
                if not improved and w < 1e-6 * (hi - lo):
                    break
            if violation[0] is not None:
                break
    except _Budget:
        pass

    witness = violation[0] if violation[0] is not None else best[0]
    return FalsifyResult(
        found=violation[0] is not None,
        witness=witness,
        k=k,
        evaluations=state["evals"],
        skipped=state["skipped"],
        restarts=done,
        seed=seed,
    )
