import pytest

from intfix.contraction import ConditionPreset
from intfix.expr import RealMap
from intfix.gauge import Gauge
from intfix.problem import Problem, Sampling, load_problem
from intfix.space import Domain, MapProperties, MetricSpace

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example_problem():
    return load_problem("example_2_3.json")


@pytest.fixture(scope="session")
def rhoades_problem():
    return load_problem("example_2_3_rhoades.json")


@pytest.fixture(scope="session")
def banach_problem():
    return load_problem("banach_linear.json")


def make_problem(
    S,
    kind="branciari",
    k=0.5,
    T="x",
    phi="1",
    lower=1.0,
    upper=float("inf"),
    upper_closed=False,
    metric=None,
    span=10.0,
    props=None,
):
    T_map = RealMap.parse(T)
    return Problem(
        space=MetricSpace(Domain(lower, upper, True, upper_closed), RealMap.parse(metric) if metric else None, span),
        S=RealMap.parse(S),
        preset=ConditionPreset(kind, k, T_map),
        gauge=Gauge.from_source(phi),
        T_properties=props or MapProperties.identity(),
        sampling=Sampling(200, 0, span),
    )
