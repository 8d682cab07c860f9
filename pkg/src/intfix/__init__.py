"""Certify, falsify and solve fixed-point problems under integral-type contractive conditions."""

__version__ = "0.1.0"

from .contraction import (  # noqa: E402
    Certificate,
    ConditionPreset,
    PairEvaluation,
    certify,
    evaluate_pair,
    falsify,
    m_max,
    m_prime,
)
from .expr import DomainError, ExprSyntaxError, RealMap, evaluate, parse, tokenize  # noqa: E402
from .gauge import Gauge, check_positivity, integrate  # noqa: E402
from .problem import Problem, ProblemError, load_problem  # noqa: E402
from .solver import SolverConfig, iterate, solve  # noqa: E402
from .space import Domain, MapProperties, MetricSpace, check_metric_axioms, sample_points  # noqa: E402

__all__ = [
    "__version__",
    "Certificate",
    "ConditionPreset",
    "PairEvaluation",
    "certify",
    "evaluate_pair",
    "falsify",
    "m_max",
    "m_prime",
    "DomainError",
    "ExprSyntaxError",
    "RealMap",
    "evaluate",
    "parse",
    "tokenize",
    "Gauge",
    "check_positivity",
    "integrate",
    "Problem",
    "ProblemError",
    "load_problem",
    "SolverConfig",
    "iterate",
    "solve",
    "Domain",
    "MapProperties",
    "MetricSpace",
    "check_metric_axioms",
    "sample_points",
]
