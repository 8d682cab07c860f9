"""Acceptance criteria 1-7, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly as a script.
"""

import sys
import time

import numpy as np
import pytest

from intfix.cli import run_full
from intfix.contraction import certify, evaluate_pair, falsify, m_max, m_prime
from intfix.expr import RealMap
from intfix.gauge import Gauge, integrate
from intfix.problem import load_problem
from intfix.solver import SolverConfig, check_step1, check_uniqueness, iterate
from intfix.space import Domain, MetricSpace, check_metric_axioms


@pytest.fixture
def record(acceptance_log):
    def _record(n: int, ok: bool, detail: str):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        acceptance_log.append(line)
        return ok

    return _record


def test_criterion_1_certification(record):
    p = load_problem("example_2_3.json", {"seed": 0, "n_pairs": 2000})
    t0 = time.perf_counter()
    cert = certify(p, 2000, seed=0)
    elapsed = time.perf_counter() - t0
    ok = (
        cert.verdict == "certified-at-k"
        and 0.5 - 1e-4 <= cert.estimated_k <= 0.5 + 1e-6
        and cert.pairs_checked >= 2000
        and elapsed < 5.0
    )
    assert record(1, ok, f"verdict={cert.verdict} estimated_k={cert.estimated_k:.10f} time={elapsed:.2f}s")


def test_criterion_2_rhoades_falsification(record):
    base = load_problem("example_2_3_rhoades.json")
    pe = evaluate_pair(base, 1.0, 4.0)
    equality = abs(pe.lhs_integral - 4.0) <= 1e-12 and abs(pe.rhs_integral - 4.0) <= 1e-12
    ok, parts = equality, []
    for k in (0.0, 0.5, 0.9, 0.999):
        t0 = time.perf_counter()
        res = falsify(base.with_preset("rhoades", k), budget=5000, seed=0)
        elapsed = time.perf_counter() - t0
        ok &= res.found and res.ratio >= 1 - 1e-9 and res.evaluations <= 5000 and elapsed < 5.0
        parts.append(f"k={k}: ratio={res.ratio:.6f} evals={res.evaluations} {elapsed:.2f}s")
    assert record(2, ok, f"(1,4): lhs={pe.lhs_integral!r} rhs={pe.rhs_integral!r}; " + "; ".join(parts))


def test_criterion_3_fixed_point(record):
    p = load_problem("example_2_3.json")
    cfg = SolverConfig(x0=1.0)
    _, res = iterate(p, cfg)
    uniq = check_uniqueness(p, cfg, probes=[1.0, 7.5, 100.0])
    ok = (
        res.converged
        and abs(res.fixed_point - 16.0) <= 1e-7
        and res.residual <= 1e-8
        and res.iterations <= 100
        and uniq.status == "pass"
        and uniq.spread <= 1e-7
    )
    assert record(
        3, ok,
        f"b={res.fixed_point!r} residual={res.residual:.2e} iterations={res.iterations} probe spread={uniq.spread:.2e}",
    )


def test_criterion_4_step1_bound(record):
    p = load_problem("example_2_3.json")
    trace, _ = iterate(p, SolverConfig(x0=1.0))
    d = trace.step_distances
    worst = max(dn - 0.5**n * d[0] for n, dn in enumerate(d))
    verdict = check_step1(trace, k=0.5, F=p.cumulative)
    ok = worst <= 1e-8 and verdict.passed
    assert record(4, ok, f"steps={len(d)} max excess over (1/2)^n d0 = {worst:.3e}")


def test_criterion_5_reduction(record):
    names = ["example_2_3_rhoades.json", "banach_linear.json", "sqrt_shift_affine.json"]
    mismatches = 0
    for i, name in enumerate(names):
        rh = load_problem(name)
        rh = rh.with_preset("rhoades", rh.preset.k, RealMap.identity())
        mo = rh.with_preset("moradi", rh.preset.k, RealMap.identity())
        lo, hi = rh.space.window()
        rng = np.random.default_rng(i)
        for x, y in rng.uniform(lo, hi, (500, 2)).tolist():
            a, b = evaluate_pair(rh, x, y), evaluate_pair(mo, x, y)
            fields_a = (a.lhs_upper, a.rhs_upper, a.lhs_integral, a.rhs_integral, a.ratio)
            fields_b = (b.lhs_upper, b.rhs_upper, b.lhs_integral, b.rhs_integral, b.ratio)
            if [repr(v) for v in fields_a] != [repr(v) for v in fields_b]:
                mismatches += 1
    assert record(5, mismatches == 0, f"3 problems x 500 pairs, mismatches={mismatches}")


def test_criterion_6_quadrature(record):
    cases = [("1", lambda u: u), ("2*x", lambda u: u * u), ("x^2", lambda u: u**3 / 3)]
    rng = np.random.default_rng(0)
    worst = 0.0
    for src, exact in cases:
        g = Gauge.from_source(src)
        for u in rng.uniform(0.0, 10.0, 50).tolist():
            worst = max(worst, abs(integrate(g, u) - exact(u)))
    assert record(6, worst <= 1e-10, f"3 gauges x 50 uppers, max error={worst:.2e}")


def test_criterion_7_property_suites(record):
    timings = {}

    t0 = time.perf_counter()
    euclid = check_metric_axioms(MetricSpace(Domain(0.0, 10.0, True, True)), 50, seed=0)
    squared = check_metric_axioms(MetricSpace(Domain(0.0, 10.0, True, True), RealMap.parse("x^2")), 50, seed=0)
    axioms_ok = euclid.status == "pass" and squared.status == "fail" and squared.witness is not None
    timings["axioms"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    S, T = RealMap.parse("4*sqrt(x)"), RealMap.parse("ln(e*x)")
    d = lambda a, b: abs(a - b)  # noqa: E731
    rng = np.random.default_rng(7)
    invariants_ok = True
    for x, y in rng.uniform(1.0, 1e3, (10_000, 2)).tolist():
        mxy, myx = m_max(x, y, S, d), m_max(y, x, S, d)
        pxy, pyx = m_prime(x, y, S, T, d), m_prime(y, x, S, T, d)
        if not (mxy == myx >= d(x, y) and pxy == pyx >= d(T(x), T(y))):
            invariants_ok = False
            break
    timings["invariants"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    a = run_full(load_problem("example_2_3.json", {"seed": 0})).to_json(include_timing=False)
    b = run_full(load_problem("example_2_3.json", {"seed": 0})).to_json(include_timing=False)
    determinism_ok = a == b
    timings["determinism"] = time.perf_counter() - t0

    fast = all(v < 10.0 for v in timings.values())
    ok = axioms_ok and invariants_ok and determinism_ok and fast
    times = " ".join(f"{k}={v:.2f}s" for k, v in timings.items())
    assert record(
        7, ok,
        f"axioms={axioms_ok} invariants={invariants_ok} determinism={determinism_ok} {times}",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
