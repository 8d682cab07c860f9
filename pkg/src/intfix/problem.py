"""Problem documents: JSON in, validated ``Problem`` out.

A problem file looks like::

    {
      "name": "example_2_3",
      "space": {"domain": {"lower": 1, "upper": null,
                           "lower_closed": true, "upper_closed": false},
                "metric": "euclidean"},
      "S": "4*sqrt(x)",
      "T": "ln(e*x)",
      "T_properties": {"one_to_one": true, "continuous": true,
                       "sequentially_convergent": true},
      "gauge": {"phi": "1", "breakpoints": [], "quad_tol": 1e-10},
      "preset": {"kind": "moradi", "k": 0.5},
      "sampling": {"n_pairs": 2000, "seed": 0, "span": 30},
      "solver": {"x0": 1, "tol": 1e-10, "max_iter": 10000,
                 "uniqueness_probes": [1, 7.5, 100]}
    }

``T`` defaults to the identity and ``gauge`` to phi = 1. An ``upper`` of
``null`` or ``"inf"`` means an unbounded domain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any

from .contraction import ConditionPreset
from .expr import ExprError, RealMap
from .gauge import DEFAULT_QUAD_TOL, CumulativeIntegral, Gauge, GaugeError
from .solver import SolverConfig
from .space import DEFAULT_SPAN, Domain, MapProperties, MetricSpace

__all__ = [
    "Problem",
    "Sampling",
    "ProblemError",
    "load_problem",
    "problem_from_dict",
    "problem_to_dict",
    "fixture_path",
    "list_fixtures",
]


class ProblemError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None, offset: int | None = None):
        where = []
        if field:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} [{', '.join(where)}]" if where else message)
        self.field = field
        self.line = line
        self.offset = offset


@dataclass(frozen=True)
class Sampling:
    n_pairs: int = 2000
    seed: int = 0
    span: float = DEFAULT_SPAN

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if not (self.span > 0 and math.isfinite(self.span)):
            raise ValueError("span must be a positive real")


@dataclass(frozen=True)
class Problem:
    space: MetricSpace
    S: RealMap
    preset: ConditionPreset
    gauge: Gauge = field(default_factory=Gauge.constant)
    T_properties: MapProperties = field(default_factory=MapProperties.identity)
    sampling: Sampling = field(default_factory=Sampling)
    solver: SolverConfig | None = None
    name: str = "problem"

    def __post_init__(self):
        if self.preset.kind != "moradi" and not self.preset.T.is_identity:
            raise ValueError(f"preset {self.preset.kind!r} requires the identity T")

    @property
    def T(self) -> RealMap:
        return self.preset.T

    @cached_property
    def cumulative(self) -> CumulativeIntegral:
        return CumulativeIntegral(self.gauge)

    def solver_config(self) -> SolverConfig:
        if self.solver is not None:
            return self.solver
        return SolverConfig(x0=self.space.domain.clamp_inside(self.space.domain.lower))

    def with_preset(self, kind: str, k: float | None = None, T: RealMap | None = None) -> "Problem":
        preset = ConditionPreset(kind, self.preset.k if k is None else k, T if T is not None else self.preset.T)
        return replace(self, preset=preset)


def _expr(source: Any, name: str) -> RealMap:
    if not isinstance(source, str):
        raise ProblemError("expression must be a string", name)
    try:
        return RealMap.parse(source)
    except ExprError as exc:
        raise ProblemError(f"cannot parse expression {source!r}: {exc.message}", name, offset=exc.offset) from exc


def _upper(value: Any) -> float:
    if value is None or (isinstance(value, str) and value.lower() in {"inf", "+inf", "infinity"}):
        return math.inf
    return float(value)


def _section(doc: dict, key: str) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict):
        raise ProblemError("expected an object", key)
    return sec


def problem_from_dict(doc: dict, overrides: dict | None = None) -> Problem:
    """Build and validate a Problem; ``overrides`` (seed, n_pairs, tol, max_iter) win over the file."""
    if not isinstance(doc, dict):
        raise ProblemError("problem document must be a JSON object")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    space_doc = _section(doc, "space")
    dom_doc = space_doc.get("domain")
    if not isinstance(dom_doc, dict) or "lower" not in dom_doc:
        raise ProblemError("domain with a 'lower' bound is required", "space.domain")
    try:
        domain = Domain(
            float(dom_doc["lower"]),
            _upper(dom_doc.get("upper")),
            bool(dom_doc.get("lower_closed", True)),
            bool(dom_doc.get("upper_closed", False)),
        )
    except (TypeError, ValueError) as exc:
        raise ProblemError(str(exc), "space.domain") from exc

    metric_src = space_doc.get("metric", "euclidean")
    metric = None if metric_src == "euclidean" else _expr(metric_src, "space.metric")

    samp_doc = _section(doc, "sampling")
    try:
        sampling = Sampling(
            int(overrides.get("n_pairs", samp_doc.get("n_pairs", 2000))),
            int(overrides.get("seed", samp_doc.get("seed", space_doc.get("seed", 0)))),
            float(samp_doc.get("span", space_doc.get("span", DEFAULT_SPAN))),
        )
    except (TypeError, ValueError) as exc:
        raise ProblemError(str(exc), "sampling") from exc
    space = MetricSpace(domain, metric, sampling.span, sampling.seed)

    if "S" not in doc:
        raise ProblemError("the map S is required", "S")
    S = _expr(doc["S"], "S")
    T = _expr(doc["T"], "T") if doc.get("T") is not None else RealMap.identity()

    props_doc = _section(doc, "T_properties")
    if T.is_identity and not props_doc:
        props = MapProperties.identity()
    else:
        seq = bool(props_doc.get("sequentially_convergent", False))
        try:
            props = MapProperties(
                bool(props_doc.get("one_to_one", False)),
                bool(props_doc.get("continuous", False)),
                seq,
                bool(props_doc.get("subsequentially_convergent", seq)),
            )
        except ValueError as exc:
            raise ProblemError(str(exc), "T_properties") from exc

    gauge_doc = doc.get("gauge")
    if gauge_doc is None:
        gauge_doc = {"phi": "1"}
    elif isinstance(gauge_doc, str):
        gauge_doc = {"phi": gauge_doc}
    phi = _expr(gauge_doc.get("phi", "1"), "gauge.phi")
    try:
        gauge = Gauge(
            phi,
            tuple(gauge_doc.get("breakpoints", ())),
            float(gauge_doc.get("quad_tol", DEFAULT_QUAD_TOL)),
        )
    except (GaugeError, TypeError, ValueError) as exc:
        raise ProblemError(str(exc), "gauge") from exc

    preset_doc = doc.get("preset")
    if not isinstance(preset_doc, dict) or "kind" not in preset_doc or "k" not in preset_doc:
        raise ProblemError("preset with 'kind' and 'k' is required", "preset")
    kind = preset_doc["kind"]
    k = preset_doc["k"]
    if not isinstance(k, (int, float)) or isinstance(k, bool) or not (0.0 <= k < 1.0):
        raise ProblemError(f"k must satisfy k ∈ [0,1), got {k!r}", "preset.k")
    try:
        preset = ConditionPreset(kind, float(k), T)
    except ValueError as exc:
        raise ProblemError(str(exc), "preset" if kind not in ("rhoades", "branciari") else "T") from exc

    solver_doc = _section(doc, "solver")
    solver = None
    if solver_doc or "tol" in overrides or "max_iter" in overrides:
        x0 = solver_doc.get("x0", domain.clamp_inside(domain.lower))
        probes = solver_doc.get("uniqueness_probes", 3)
        try:
            solver = SolverConfig(
                x0=float(x0),
                tol=float(overrides.get("tol", solver_doc.get("tol", 1e-10))),
                max_iter=overrides.get("max_iter", solver_doc.get("max_iter", 10000)),
                uniqueness_probes=probes if isinstance(probes, int) else tuple(probes),
            )
        except (TypeError, ValueError) as exc:
            raise ProblemError(str(exc), "solver") from exc
        if solver.x0 not in domain:
            raise ProblemError(f"x0 = {solver.x0!r} is outside the domain {domain}", "solver.x0")

    return Problem(
        space=space,
        S=S,
        preset=preset,
        gauge=gauge,
        T_properties=props,
        sampling=sampling,
        solver=solver,
        name=str(doc.get("name", "problem")),
    )


def fixture_path(name: str) -> Path:
    fname = name if name.endswith(".json") else f"{name}.json"
    return Path(str(resources.files("intfix") / "fixtures" / fname))


def list_fixtures() -> list[str]:
    root = resources.files("intfix") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_problem(path: str | Path, overrides: dict | None = None) -> Problem:
    """Load a problem file; a bare fixture name such as ``example_2_3.json`` also works."""
    p = Path(path)
    if not p.exists():
        bundled = fixture_path(p.name)
        if bundled.exists():
            p = bundled
        else:
            raise ProblemError(f"no such problem file: {path}")
    text = p.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"malformed JSON: {exc.msg}", line=exc.lineno, offset=exc.colno) from exc
    return problem_from_dict(doc, overrides)


def _num(x: float) -> float | None:
    return x if math.isfinite(x) else None


def problem_to_dict(problem: Problem) -> dict:
    """Echo of a problem in the file format (infinite bounds become null)."""
    dom = problem.space.domain
    out: dict[str, Any] = {
        "name": problem.name,
        "space": {
            "domain": {
                "lower": dom.lower,
                "upper": _num(dom.upper),
                "lower_closed": dom.lower_closed,
                "upper_closed": dom.upper_closed,
            },
            "metric": problem.space.metric_name,
        },
        "S": problem.S.source,
        "T": problem.T.source,
        "T_properties": {
            "one_to_one": problem.T_properties.one_to_one,
            "continuous": problem.T_properties.continuous,
            "sequentially_convergent": problem.T_properties.sequentially_convergent,
            "subsequentially_convergent": problem.T_properties.subsequentially_convergent,
        },
        "gauge": {
            "phi": problem.gauge.phi.source,
            "breakpoints": list(problem.gauge.breakpoints),
            "quad_tol": problem.gauge.quad_tol,
        },
        "preset": {"kind": problem.preset.kind, "k": problem.preset.k},
        "sampling": {
            "n_pairs": problem.sampling.n_pairs,
            "seed": problem.sampling.seed,
            "span": problem.sampling.span,
        },
    }
    if problem.solver is not None:
        cfg = problem.solver
        out["solver"] = {
            "x0": cfg.x0,
            "tol": cfg.tol,
            "max_iter": cfg.max_iter,
            "uniqueness_probes": cfg.uniqueness_probes
            if isinstance(cfg.uniqueness_probes, int)
            else list(cfg.uniqueness_probes),
        }
    return out
