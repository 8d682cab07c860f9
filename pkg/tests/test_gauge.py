import threading

import pytest

from intfix.expr import RealMap
from intfix.gauge import (
    POSITIVITY_FLOOR,
    CumulativeIntegral,
    Gauge,
    GaugeError,
    QuadratureError,
    adaptive_simpson,
    check_positivity,
    default_epsilons,
    integrate,
    integrate_between,
)

STEP = "1 + (x-1)/abs(x-1)"  # 0 below t = 1, 2 above, undefined at 1


def test_constant_gauge():
    g = Gauge.constant()
    assert integrate(g, 4.0) == pytest.approx(4.0, abs=1e-10)
    assert integrate(g, 0.0) == 0.0


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0, 3.0])
def test_linear_gauge_closed_form(u):
    assert abs(integrate(Gauge.from_source("2*x"), u) - u * u) <= 1e-10


def test_ramp_gauge_against_closed_form():
    ramp = Gauge.from_source("max(0, x - 1)")
    # F(u) = (u - 1)^2 / 2 for u >= 1, else 0
    assert integrate(ramp, 0.5) == 0.0
    for u in (1.0, 1.25, 2.0, 3.0, 7.5):
        assert abs(integrate(ramp, u) - 0.5 * (u - 1.0) ** 2) <= 1e-10


def test_min_depth_catches_mass_between_simpson_nodes():
    # all 5 nodes of a single Simpson panel on [0, 1.01] see zero
    ramp = Gauge.from_source("max(0, x - 1)")
    assert abs(integrate(ramp, 1.01) - 0.5 * 0.01**2) <= 1e-10


def test_inverse_square_gauge():
    g = Gauge.from_source("1/(1+x)^2")
    for u in (0.1, 1.0, 10.0, 250.0):
        assert abs(integrate(g, u) - u / (1.0 + u)) <= 1e-10


def test_breakpoints_enable_jump_integrands():
    with_bp = Gauge.from_source(STEP, breakpoints=[1.0])
    assert abs(integrate(with_bp, 3.0) - 4.0) <= 1e-10
    assert integrate(with_bp, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert abs(integrate_between(with_bp, 1.0, 2.5) - 3.0) <= 1e-10


def test_jump_without_breakpoint_does_not_converge():
    step = RealMap.parse(STEP)
    with pytest.raises(QuadratureError):
        adaptive_simpson(step, 0.0, 3.0, 1e-10, max_depth=40)


@pytest.mark.parametrize("coeffs", [(1.0,), (0.0, 2.0), (0.0, 0.0, 1.0), (1.0, -0.5, 0.25, 0.125)])
def test_simpson_exact_for_cubics(coeffs):
    f = lambda t: sum(c * t**i for i, c in enumerate(coeffs))  # noqa: E731
    exact = sum(c * 2.0 ** (i + 1) / (i + 1) for i, c in enumerate(coeffs))
    assert adaptive_simpson(f, 0.0, 2.0, 1e-10) == pytest.approx(exact, rel=1e-14, abs=1e-14)


def test_negative_phi_rejected_at_construction():
    with pytest.raises(GaugeError):
        Gauge.from_source("x - 1")


def test_undefined_phi_rejected_at_construction():
    with pytest.raises(GaugeError):
        Gauge.from_source("ln(x)")


@pytest.mark.parametrize("bps", [[2.0, 1.0], [-1.0], [1.0, 1.0]])
def test_bad_breakpoints(bps):
    with pytest.raises(GaugeError):
        Gauge.constant(breakpoints=bps)


def test_negative_upper_rejected():
    with pytest.raises(QuadratureError):
        integrate(Gauge.constant(), -1.0)


def test_positivity_constant_gauge_passes():
    rep = check_positivity(Gauge.constant(), [1e-6, 1e-3, 1.0, 10.0])
    assert rep.passed and rep.checked == 4


def test_positivity_zero_gauge_fails():
    rep = check_positivity(Gauge.from_source("0"), [1.0])
    assert not rep.passed
    assert rep.failing == (1.0,)


def test_positivity_ramp_fails_below_its_support():
    rep = check_positivity(Gauge.from_source("max(0, x - 1)"), [0.5, 2.0])
    assert rep.failing == (0.5,)


def test_positivity_floor_flags_quadratic_growth_at_tiny_eps():
    # F(eps) = eps^2 = 1e-16 sits under the numerical-zero floor
    rep = check_positivity(Gauge.from_source("2*x"), [1e-8, 1e-3])
    assert rep.failing == (1e-8,)
    assert rep.floor == POSITIVITY_FLOOR


def test_positivity_requires_positive_eps():
    with pytest.raises(ValueError):
        check_positivity(Gauge.constant(), [0.0])


def test_default_epsilons_span():
    eps = default_epsilons(30.0)
    assert eps[0] == pytest.approx(1e-8)
    assert eps[-1] == pytest.approx(30.0)
    assert all(a < b for a, b in zip(eps, eps[1:]))


def test_cumulative_cache_behaves_like_direct_integration():
    g = Gauge.from_source("1/(1+x)^2")
    F = CumulativeIntegral(g, maxsize=8)
    us = [0.1 * i for i in range(40)] * 2
    assert [F(u) for u in us] == [integrate(g, u) for u in us]
    table = F.table()
    assert all(a[0] < b[0] and a[1] <= b[1] for a, b in zip(table, table[1:]))


def test_cumulative_cache_concurrent_reads():
    g = Gauge.from_source("1 + x")
    F = CumulativeIntegral(g)
    expected = {u: integrate(g, u) for u in (0.5, 1.0, 2.0, 4.0)}
    errors = []

    def worker():
        for _ in range(50):
            for u, v in expected.items():
                if F(u) != v:
                    errors.append(u)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors


def test_gauge_is_callable():
    assert Gauge(RealMap.parse("2*x"))(3.0) == 6.0
