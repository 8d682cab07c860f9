import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_problem
from intfix.contraction import evaluate_pair, m_max, m_prime
from intfix.expr import BinaryOp, Call, Constant, UnaryOp, Variable, parse_source, to_source
from intfix.gauge import Gauge, integrate, integrate_between
from intfix.space import Domain, MetricSpace, check_metric_axioms, sample_points

QUAD_TOL = 1e-10
GAUGES = [Gauge.from_source(src) for src in ("1", "1 + x", "x^2", "1/(1+x)^2", "max(0, x - 1)")]
S_EX = make_problem("4*sqrt(x)").S
T_EX = make_problem("4*sqrt(x)", kind="moradi", T="ln(e*x)").T

uppers = st.floats(0.0, 20.0, allow_nan=False)
points = st.floats(1.0, 1e4, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GAUGES), uppers, uppers)
def test_integral_monotone(g, a, b):
    u1, u2 = min(a, b), max(a, b)
    assert integrate(g, u1) <= integrate(g, u2) + 2 * QUAD_TOL


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GAUGES), uppers, uppers)
def test_integral_additive(g, a, b):
    u1, u2 = min(a, b), max(a, b)
    assert abs(integrate(g, u1) + integrate_between(g, u1, u2) - integrate(g, u2)) <= 3 * QUAD_TOL


@settings(max_examples=300, deadline=None)
@given(points, points)
def test_m_symmetry_and_dominance(x, y):
    d = lambda a, b: abs(a - b)  # noqa: E731
    assert m_max(x, y, S_EX, d) == m_max(y, x, S_EX, d)
    assert m_prime(x, y, S_EX, T_EX, d) == m_prime(y, x, S_EX, T_EX, d)
    assert m_max(x, y, S_EX, d) >= d(x, y)
    assert m_prime(x, y, S_EX, T_EX, d) >= d(T_EX(x), T_EX(y))


@settings(max_examples=100, deadline=None)
@given(points, points)
def test_unit_gauge_ratio_is_distance_ratio(x, y):
    pe = evaluate_pair(make_problem("4*sqrt(x)", kind="rhoades"), x, y)
    if pe.ratio is not None:
        assert abs(pe.ratio - pe.lhs_upper / pe.rhs_upper) <= QUAD_TOL


def _ast():
    leaf = st.one_of(
        st.just(Variable()),
        st.floats(0.0, 1e6, allow_nan=False, allow_infinity=False).map(Constant),
        st.sampled_from([Constant(math.e, "e"), Constant(math.pi, "pi")]),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinaryOp(*t)),
            children.map(lambda c: UnaryOp("-", c)),
            st.tuples(st.sampled_from(["sqrt", "ln", "exp", "abs"]), children).map(lambda t: Call(t[0], (t[1],))),
            st.tuples(st.sampled_from(["min", "max", "pow"]), children, children).map(lambda t: Call(t[0], t[1:])),
        )

    return st.recursive(leaf, extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(_ast())
def test_ast_round_trip(node):
    assert parse_source(to_source(node)) == node


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 40))
def test_sampling_reproducible(seed, n):
    space = MetricSpace(Domain(1.0), span=10.0)
    a = sample_points(space, n, seed)
    assert a == sample_points(space, n, seed)
    assert all(p in space.domain for p in a)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(-50.0, 50.0), st.floats(0.1, 100.0))
def test_euclidean_axioms_always_pass(seed, lo, width):
    space = MetricSpace(Domain(lo, lo + width, True, True))
    assert check_metric_axioms(space, 20, seed).status == "pass"


def test_m_invariants_on_ten_thousand_pairs():
    rng = np.random.default_rng(0)
    xs, ys = rng.uniform(1.0, 1e3, 10_000), rng.uniform(1.0, 1e3, 10_000)
    d = lambda a, b: abs(a - b)  # noqa: E731
    for x, y in zip(xs.tolist(), ys.tolist()):
        assert m_max(x, y, S_EX, d) == m_max(y, x, S_EX, d) >= d(x, y)
        assert m_prime(x, y, S_EX, T_EX, d) == m_prime(y, x, S_EX, T_EX, d) >= d(T_EX(x), T_EX(y))
