"""Picard iteration tracked through T, with diagnostics mirroring the convergence argument.

The orbit is recorded twice: ``s_orbit[n] = S^n(x0)`` and the T-image
``t_orbit[n] = T(S^n(x0))``. Stopping is decided in T-image space, then the
fixed point is validated in S-space through its residual ``d(S(b), b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Callable, Sequence

from .expr import DomainError
from .gauge import QuadratureError
from .space import MapProperties, sample_points

if TYPE_CHECKING:
    from .problem import Problem

__all__ = [
    "SolverConfig",
    "OrbitTrace",
    "SolveResult",
    "Step1Verdict",
    "BoundednessCauchyVerdict",
    "UniquenessVerdict",
    "PosthocNote",
    "iterate",
    "solve",
    "check_step1",
    "check_step2_step3",
    "check_uniqueness",
    "posthoc_convergence_check",
    "RESIDUAL_TOL",
    "DIAG_TOL",
    "OVERFLOW_GUARD",
]

RESIDUAL_TOL = 1e-8
DIAG_TOL = 1e-8
OVERFLOW_GUARD = 1e12
TAIL_FOR_CLUSTERS = 64
SETTLED_GAP = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    x0: float
    tol: float = 1e-10
    max_iter: int = 10000
    uniqueness_probes: int | tuple[float, ...] = 3
    stability_window: int = 3
    residual_tol: float = RESIDUAL_TOL
    overflow_guard: float = OVERFLOW_GUARD

    def __post_init__(self):
        if not math.isfinite(self.x0):
            raise ValueError("x0 must be finite")
        if not (self.tol > 0):
            raise ValueError("tol must be > 0")
        if isinstance(self.max_iter, bool) or not isinstance(self.max_iter, int) or self.max_iter < 1:
            raise ValueError("max_iter must be an integer >= 1")
        if self.stability_window < 1:
            raise ValueError("stability_window must be >= 1")
        if not (self.residual_tol > 0):
            raise ValueError("residual_tol must be > 0")
        probes = self.uniqueness_probes
        if isinstance(probes, int):
            if probes < 0:
                raise ValueError("uniqueness_probes must be >= 0")
        else:
            object.__setattr__(self, "uniqueness_probes", tuple(float(p) for p in probes))


@dataclass(frozen=True)
class OrbitTrace:
    s_orbit: tuple[float, ...]
    t_orbit: tuple[float, ...]
    step_distances: tuple[float, ...]
    diameter_estimate: float
    cauchy_modulus: tuple[float, ...]


@dataclass(frozen=True)
class SolveResult:
    status: str  # converged | max-iter-exceeded | diverged | evaluation-error
    fixed_point: float | None
    residual: float | None
    t_limit: float | None
    iterations: int
    extraction: str | None = None  # last-point | subsequence
    accumulation_points: tuple[float, ...] = ()
    reason: str = ""
    error_index: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _diameter(points: Sequence[float], d: Callable[[float, float], float]) -> float:
    # extremes of a 1-D set realize the diameter for any metric increasing in |x - y|
    if len(points) < 2:
        return 0.0
    cands = {min(points), max(points), points[0], points[-1]}
    cands = sorted(cands)
    return max(d(a, b) for a in cands for b in cands)


def _cauchy_modulus(points: Sequence[float], d: Callable[[float, float], float]) -> tuple[float, ...]:
    """sup_{m > n} d(x_m, x_n) for each n, via suffix extremes."""
    n = len(points)
    if n < 2:
        return ()
    out = [0.0] * (n - 1)
    hi = lo = points[-1]
    for i in range(n - 2, -1, -1):
        x = points[i]
        out[i] = max(d(x, hi), d(x, lo))
        hi, lo = max(hi, x), min(lo, x)
    return tuple(out)


def _trace(s_orbit, t_orbit, steps, d) -> OrbitTrace:
    return OrbitTrace(
        tuple(s_orbit),
        tuple(t_orbit),
        tuple(steps),
        _diameter(t_orbit, d),
        _cauchy_modulus(t_orbit, d),
    )


def iterate(problem: "Problem", config: SolverConfig) -> tuple[OrbitTrace, SolveResult]:
    S, T = problem.S, problem.T
    dom = problem.space.domain
    d = problem.space.distance
    if config.x0 not in dom:
        raise ValueError(f"x0 = {config.x0!r} is outside the domain {dom}")

    s_orbit = [float(config.x0)]
    steps: list[float] = []
    try:
        t_orbit = [T(s_orbit[0])]
    except DomainError as exc:
        return _trace(s_orbit, [], [], d), SolveResult(
            "evaluation-error", None, None, None, 0, reason=str(exc), error_index=0
        )

    stable = 0
    status = None
    reason = ""
    error_index = None
    for n in range(config.max_iter):
        try:
            s_next = S(s_orbit[-1])
        except DomainError as exc:
            status, reason, error_index = "evaluation-error", f"S failed at step {n}: {exc}", n
            break
        if s_next not in dom or abs(s_next) > config.overflow_guard:
            status, reason, error_index = "diverged", f"orbit left the domain at step {n + 1} (x = {s_next!r})", n + 1
            break
        try:
            t_next = T(s_next)
        except DomainError as exc:
            status, reason, error_index = "evaluation-error", f"T failed at step {n + 1}: {exc}", n + 1
            break
        dist = d(t_orbit[-1], t_next)
        s_orbit.append(s_next)
        t_orbit.append(t_next)
        steps.append(dist)
        stable = stable + 1 if dist <= config.tol else 0
        if stable >= config.stability_window:
            break
    trace = _trace(s_orbit, t_orbit, steps, d)

    if status is not None:
        return trace, SolveResult(status, None, None, None, len(steps), reason=reason, error_index=error_index)
    if stable < config.stability_window:
        return trace, SolveResult(
            "max-iter-exceeded", None, None, None, len(steps),
            reason=f"T-image steps still above tol after {config.max_iter} iterations",
        )
    return trace, _extract(problem, config, trace, len(steps) - config.stability_window)


def _extract(problem, config, trace: OrbitTrace, iterations: int) -> SolveResult:
    S, T = problem.S, problem.T
    d = problem.space.distance
    a = trace.t_orbit[-1]
    rtol = config.residual_tol

    def check(b: float):
        try:
            return d(S(b), b), abs(T(b) - a)
        except DomainError:
            return math.inf, math.inf

    b = trace.s_orbit[-1]
    res, tb_gap = check(b)
    if res <= rtol and tb_gap <= rtol:
        return SolveResult("converged", b, res, a, iterations, extraction="last-point")

    # the S-orbit itself did not settle: look for accumulation points in its tail
    # only tail points whose T-image has already settled at a are candidates
    tail = list(zip(trace.s_orbit, trace.t_orbit))[-TAIL_FOR_CLUSTERS:]
    near = [s for s, t in tail if d(t, a) <= SETTLED_GAP * (1.0 + abs(a))]
    centers = _cluster_tail(near or [s for s, _ in tail])
    scored = sorted((check(c) + (c,) for c in centers), key=lambda r: (r[0], r[1], r[2]))
    acc = tuple(sorted(centers))
    for res_c, gap_c, c in scored:
        if res_c <= rtol and gap_c <= rtol:
            return SolveResult(
                "converged", c, res_c, a, iterations, extraction="subsequence", accumulation_points=acc
            )
    res_c, gap_c, c = scored[0]
    return SolveResult(
        "diverged", None, res_c if math.isfinite(res_c) else None, a, iterations,
        extraction="subsequence",
        accumulation_points=acc,
        reason="T-image orbit converged but no accumulation point of the S-orbit is fixed by S",
    )


def _cluster_tail(tail: Sequence[float]) -> list[float]:
    """Group tail points by proximity; each group is represented by its latest member."""
    if not tail:
        return []
    scale = 1.0 + max(abs(v) for v in tail)
    gap = 1e-6 * scale
    order = sorted(range(len(tail)), key=lambda i: tail[i])
    groups: list[list[int]] = [[order[0]]]
    for i in order[1:]:
        if tail[i] - tail[groups[-1][-1]] > gap:
            groups.append([i])
        else:
            groups[-1].append(i)
    return [tail[max(g)] for g in groups]


def solve(problem: "Problem", config: SolverConfig) -> SolveResult:
    return iterate(problem, config)[1]


# --- diagnostics ---------------------------------------------------------------


@dataclass(frozen=True)
class Step1Verdict:
    passed: bool
    decay_ok: bool
    bound_checked: bool
    bound_ok: bool | None
    first_violation: int | None
    checked: int
    detail: str = ""


def check_step1(
    trace: OrbitTrace,
    k: float | None = None,
    F: Callable[[float], float] | None = None,
    tol: float = 1e-10,
    diag_tol: float = DIAG_TOL,
) -> Step1Verdict:
    """Successive T-image distances must shrink to zero.

    With a certified constant ``k`` and cumulative integral ``F`` the
    geometric bound ``F(d_n) <= k**n * F(d_0) + diag_tol`` is also enforced.
    """
    steps = trace.step_distances
    if len(steps) == 0:
        return Step1Verdict(True, True, False, None, None, 0, "no steps recorded")

    first = None
    if steps[-1] > tol:
        first = next(
            (n for n in range(1, len(steps)) if steps[n] > tol and steps[n] >= steps[n - 1]),
            len(steps) - 1,
        )
    decay_ok = first is None

    bound_ok = None
    bound_first = None
    if k is not None:
        F = F or (lambda u: u)
        base = F(steps[0])
        for n, dn in enumerate(steps):
            if F(dn) > k**n * base + diag_tol:
                bound_first = n
                break
        bound_ok = bound_first is None

    passed = decay_ok and bound_ok is not False
    firsts = [i for i in (first, bound_first) if i is not None]
    detail = []
    if not decay_ok:
        detail.append(f"step distances do not decay below tol (index {first})")
    if bound_ok is False:
        detail.append(f"geometric bound violated at index {bound_first}")
    return Step1Verdict(
        passed, decay_ok, k is not None, bound_ok, min(firsts) if firsts else None, len(steps), "; ".join(detail)
    )


@dataclass(frozen=True)
class BoundednessCauchyVerdict:
    bounded: bool
    cauchy: bool
    diameter: float
    half_diameter: float
    final_modulus: float | None
    checked: int
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", self.bounded and self.cauchy)


def check_step2_step3(
    trace: OrbitTrace,
    d: Callable[[float, float], float] | None = None,
    tol: float = 1e-10,
    stability: float = 1e-3,
) -> BoundednessCauchyVerdict:
    """Boundedness: the orbit's diameter stops growing over the second half of the trace.
    Cauchy: the tail modulus is nonincreasing and ends at or below ``tol``.
    """
    pts = trace.t_orbit
    d = d or (lambda a, b: abs(a - b))
    if len(pts) < 2:
        return BoundednessCauchyVerdict(True, True, 0.0, 0.0, None, len(pts))
    diam = trace.diameter_estimate
    half = _diameter(pts[: len(pts) // 2 + 1], d)
    bounded = math.isfinite(diam) and diam <= half * (1.0 + stability) + tol

    mod = trace.cauchy_modulus
    tail = mod[len(mod) // 2:]
    slack = 1e-12 * max(1.0, diam)
    monotone = all(b <= a + slack for a, b in zip(tail, tail[1:]))
    cauchy = monotone and mod[-1] <= tol
    return BoundednessCauchyVerdict(bounded, cauchy, diam, half, mod[-1], len(pts))


@dataclass(frozen=True)
class UniquenessVerdict:
    status: str  # pass | fail | inconclusive
    probes: tuple[float, ...]
    limits: tuple[float | None, ...]
    spread: float | None
    tolerance: float


def _probe_points(problem: "Problem", config: SolverConfig) -> tuple[float, ...]:
    probes = config.uniqueness_probes
    if isinstance(probes, int):
        return tuple(sample_points(problem.space, probes, problem.space.seed))
    return probes


def check_uniqueness(
    problem: "Problem", config: SolverConfig, probes: Sequence[float] | None = None
) -> UniquenessVerdict:
    pts = tuple(float(p) for p in probes) if probes is not None else _probe_points(problem, config)
    tol = 10 * config.residual_tol
    limits: list[float | None] = []
    for p in pts:
        try:
            r = solve(problem, _with_x0(config, p))
        except (ValueError, DomainError, QuadratureError):
            limits.append(None)
            continue
        limits.append(r.fixed_point if r.converged else None)
    if not pts:
        return UniquenessVerdict("inconclusive", pts, (), None, tol)
    if any(v is None for v in limits):
        return UniquenessVerdict("inconclusive", pts, tuple(limits), None, tol)
    spread = max(limits) - min(limits)
    return UniquenessVerdict("pass" if spread <= tol else "fail", pts, tuple(limits), spread, tol)


def _with_x0(config: SolverConfig, x0: float) -> SolverConfig:
    return replace(config, x0=float(x0))


@dataclass(frozen=True)
class PosthocNote:
    observed: str  # s-orbit-converged | subsequence-extracted | not-converged
    declared: str
    consistent: bool
    message: str
    accumulation_point: float | None = None


def posthoc_convergence_check(
    trace: OrbitTrace, result: SolveResult, props: MapProperties, T_is_identity: bool = False
) -> PosthocNote:
    """Compare T's declared convergence properties with what this orbit actually did."""
    if props.sequentially_convergent:
        declared = "sequentially convergent"
    elif props.subsequentially_convergent:
        declared = "subsequentially convergent"
    else:
        declared = "no convergence property"

    if T_is_identity:
        return PosthocNote(
            "s-orbit-converged" if result.converged else "not-converged",
            declared, True, "T is the identity: always consistent",
            result.fixed_point,
        )
    if result.extraction == "last-point":
        return PosthocNote(
            "s-orbit-converged", declared, True,
            f"declared {declared}: consistent (S-orbit converged to {result.fixed_point!r})",
            result.fixed_point,
        )
    if result.extraction == "subsequence":
        b = result.fixed_point
        if b is None and result.accumulation_points:
            b = _nearest_preimage(trace, result)
        consistent = not props.sequentially_convergent
        verdict = "consistent" if consistent else "inconsistent (S-orbit did not converge)"
        return PosthocNote(
            "subsequence-extracted", declared, consistent,
            f"subsequence extracted: accumulation point b = {b!r} with T(b) = a = {result.t_limit!r}; "
            f"declared {declared}: {verdict}",
            b,
        )
    return PosthocNote("not-converged", declared, True, f"no convergence observed ({result.status}); nothing to compare")


def _nearest_preimage(trace: OrbitTrace, result: SolveResult) -> float:
    # accumulation point whose latest orbit occurrence has the T-value closest to a
    a = result.t_limit
    pairs = list(zip(trace.s_orbit, trace.t_orbit))
    best = None
    for c in result.accumulation_points:
        gap = min(abs(t - a) for s, t in pairs[-TAIL_FOR_CLUSTERS:] if s == c)
        if best is None or (gap, c) < best:
            best = (gap, c)
    return best[1]
