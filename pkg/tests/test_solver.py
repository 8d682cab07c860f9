import math

import pytest

from conftest import make_problem
from intfix.solver import (
    SolverConfig,
    check_step1,
    check_step2_step3,
    check_uniqueness,
    iterate,
    posthoc_convergence_check,
    solve,
)
from intfix.space import MapProperties

OSCILLATOR = "-x/abs(x)*(1 + (abs(x)-1)/2)"  # x -> -sign(x) * (1 + (|x| - 1)/2)


@pytest.fixture(scope="module")
def ex_trace(example_problem):
    return iterate(example_problem, SolverConfig(x0=1.0))


def test_example_orbit_prefix(ex_trace):
    trace, _ = ex_trace
    assert trace.s_orbit[:5] == pytest.approx([1.0, 4.0, 8.0, 8 * math.sqrt(2), 4 * math.sqrt(8 * math.sqrt(2))])
    assert trace.s_orbit[3] == pytest.approx(11.313708, abs=1e-6)
    assert trace.s_orbit[4] == pytest.approx(13.454342, abs=1e-6)


def test_example_t_steps_halve(ex_trace):
    trace, _ = ex_trace
    for n, dn in enumerate(trace.step_distances[:20]):
        assert dn == pytest.approx(math.log(4) / 2**n, rel=1e-9, abs=1e-15)


def test_example_converges_to_sixteen(ex_trace):
    _, res = ex_trace
    assert res.converged and res.extraction == "last-point"
    assert abs(res.fixed_point - 16.0) <= 1e-7
    assert res.residual <= 1e-8
    assert res.iterations <= 100
    assert res.t_limit == pytest.approx(1 + math.log(16), abs=1e-9)


def test_start_at_fixed_point(example_problem):
    res = solve(example_problem, SolverConfig(x0=16.0))
    assert res.converged and res.iterations == 0
    assert res.fixed_point == 16.0 and res.residual == 0.0


def test_translation_never_settles():
    p = make_problem("x + 1")
    res = solve(p, SolverConfig(x0=1.0, max_iter=200))
    assert res.status == "max-iter-exceeded" and res.fixed_point is None


def test_overflow_guard_marks_divergence():
    p = make_problem("2*x")
    res = solve(p, SolverConfig(x0=1.0, max_iter=1000))
    assert res.status == "diverged"
    assert res.error_index == 40  # 2^40 > 1e12


def test_orbit_leaving_domain():
    p = make_problem("x + 3", upper=5.0, upper_closed=True)
    res = solve(p, SolverConfig(x0=1.0))
    assert res.status == "diverged" and res.error_index == 2


def test_x0_outside_domain(example_problem):
    with pytest.raises(ValueError):
        iterate(example_problem, SolverConfig(x0=0.5))


@pytest.mark.parametrize(
    "kwargs", [dict(x0=math.nan), dict(x0=1.0, tol=0.0), dict(x0=1.0, max_iter=0), dict(x0=1.0, uniqueness_probes=-1)]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_step1_passes_with_geometric_bound(example_problem, ex_trace):
    trace, _ = ex_trace
    v = check_step1(trace, k=0.5, F=example_problem.cumulative)
    assert v.passed and v.decay_ok and v.bound_ok
    assert v.checked == len(trace.step_distances)


def test_step1_without_certificate_only_checks_decay(ex_trace):
    v = check_step1(ex_trace[0])
    assert v.passed and not v.bound_checked and v.bound_ok is None


def test_step1_translation_fails_at_index_one():
    trace, _ = iterate(make_problem("x + 1"), SolverConfig(x0=1.0, max_iter=30))
    v = check_step1(trace, k=0.5)
    assert not v.passed and v.first_violation == 1


def test_step2_step3_example(example_problem, ex_trace):
    trace, _ = ex_trace
    v = check_step2_step3(trace, example_problem.space.distance)
    assert v.bounded and v.cauchy and v.passed
    assert v.diameter == pytest.approx(math.log(16), abs=1e-9)
    assert v.final_modulus <= 1e-10


def test_step2_step3_translation_unbounded():
    trace, _ = iterate(make_problem("x + 1"), SolverConfig(x0=1.0, max_iter=40))
    v = check_step2_step3(trace)
    assert not v.bounded and not v.cauchy


def test_uniqueness_example_probes(example_problem):
    v = check_uniqueness(example_problem, SolverConfig(x0=1.0), probes=[1.0, 100.0, 7.5])
    assert v.status == "pass"
    assert all(abs(b - 16.0) <= 1e-7 for b in v.limits)
    assert v.spread <= 1e-7


def test_uniqueness_constant_map():
    p = make_problem("3", k=0.0)
    v = check_uniqueness(p, SolverConfig(x0=1.0, uniqueness_probes=4))
    assert v.status == "pass" and v.limits == (3.0,) * 4


def test_uniqueness_identity_map_fails():
    p = make_problem("x")
    v = check_uniqueness(p, SolverConfig(x0=1.0), probes=[1.0, 2.0, 5.0])
    assert v.status == "fail" and v.limits == (1.0, 2.0, 5.0)


def test_uniqueness_inconclusive_on_divergent_probe():
    v = check_uniqueness(make_problem("x + 1"), SolverConfig(x0=1.0, max_iter=20), probes=[1.0])
    assert v.status == "inconclusive"


def _oscillator(props):
    return make_problem(OSCILLATOR, kind="moradi", T="x^2", lower=-3.0, upper=3.0, upper_closed=True, props=props)


def test_oscillating_orbit_extracts_subsequence():
    trace, res = iterate(_oscillator(MapProperties.identity()), SolverConfig(x0=2.0))
    assert res.extraction == "subsequence"
    assert res.status == "diverged"  # neither +1 nor -1 is fixed by S
    assert res.t_limit == pytest.approx(1.0, abs=1e-9)
    assert res.accumulation_points == pytest.approx((-1.0, 1.0), abs=1e-6)


def test_posthoc_subsequence_contradicts_sequential_declaration():
    props = MapProperties(True, True, sequentially_convergent=True, subsequentially_convergent=True)
    trace, res = iterate(_oscillator(props), SolverConfig(x0=2.0))
    note = posthoc_convergence_check(trace, res, props)
    assert note.observed == "subsequence-extracted" and not note.consistent
    assert note.message.startswith("subsequence extracted: accumulation point b = ")
    assert abs(abs(note.accumulation_point) - 1.0) < 1e-6


def test_posthoc_subsequence_consistent_with_subsequential_declaration():
    props = MapProperties(True, True, sequentially_convergent=False, subsequentially_convergent=True)
    trace, res = iterate(_oscillator(props), SolverConfig(x0=2.0))
    assert posthoc_convergence_check(trace, res, props).consistent


def test_posthoc_last_point(example_problem, ex_trace):
    trace, res = ex_trace
    note = posthoc_convergence_check(trace, res, example_problem.T_properties)
    assert note.observed == "s-orbit-converged" and note.consistent
    assert "consistent" in note.message


def test_posthoc_identity_T(banach_problem):
    trace, res = iterate(banach_problem, banach_problem.solver_config())
    note = posthoc_convergence_check(trace, res, banach_problem.T_properties, T_is_identity=True)
    assert note.consistent and note.accumulation_point == pytest.approx(2.0, abs=1e-9)


def test_iteration_is_deterministic(example_problem):
    assert iterate(example_problem, SolverConfig(x0=3.0)) == iterate(example_problem, SolverConfig(x0=3.0))
