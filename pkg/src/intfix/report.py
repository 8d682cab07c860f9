"""Report assembly, JSON serialization and plain-text rendering."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__

__all__ = ["Report", "to_jsonable", "read_report", "report_verdicts", "render_text"]

THEOREM_APPLIES = "theorem applies (sampled evidence)"
HEURISTIC = "heuristic run"


def to_jsonable(obj: Any) -> Any:
    """Dataclasses/tuples to plain JSON types; non-finite floats become null."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if hasattr(obj, "source"):  # RealMap
        return obj.source
    if hasattr(obj, "item"):  # numpy scalar
        return to_jsonable(obj.item())
    return str(obj)


@dataclass
class Report:
    command: str
    problem: dict
    options: dict = field(default_factory=dict)
    stages: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    hypothesis_failures: list = field(default_factory=list)
    conclusion: str | None = None
    version: str = __version__
    timing: dict = field(default_factory=dict)

    def add(self, stage: str, value: Any) -> None:
        self.stages[stage] = to_jsonable(value)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "tool": {"name": "intfix", "version": self.version},
            "command": self.command,
            "problem": self.problem,
            "options": to_jsonable(self.options),
            "stages": self.stages,
            "errors": to_jsonable(self.errors),
            "hypothesis_failures": list(self.hypothesis_failures),
            "conclusion": self.conclusion,
        }
        if include_timing:
            out["timing"] = {k: round(v, 6) for k, v in sorted(self.timing.items())}
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @property
    def failed(self) -> bool:
        return bool(self.errors)


def read_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def report_verdicts(report: Report | dict) -> dict[str, Any]:
    """Flat stage -> verdict mapping; identical for a report and its re-read JSON."""
    data = report.to_dict() if isinstance(report, Report) else report
    stages = data.get("stages", {})
    out: dict[str, Any] = {"conclusion": data.get("conclusion")}
    keys = {
        "positivity": "passed",
        "metric_axioms": "status",
        "injectivity": "passed",
        "certificate": "verdict",
        "falsify": "found",
        "solve": "status",
        "step1": "passed",
        "step2_step3": "passed",
        "uniqueness": "status",
        "posthoc": "consistent",
    }
    for stage, key in keys.items():
        if stage in stages:
            out[stage] = stages[stage].get(key)
    return out


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def render_text(report: Report) -> str:
    st = report.stages
    lines = [f"intfix {report.version} :: {report.command} :: {report.problem.get('name')}"]
    p = report.problem
    lines.append(
        f"  S(x) = {p['S']}   T(x) = {p['T']}   phi(t) = {p['gauge']['phi']}   "
        f"preset = {p['preset']['kind']} (k = {p['preset']['k']})"
    )
    if "positivity" in st:
        pos = st["positivity"]
        lines.append(f"  gauge positivity: {'pass' if pos['passed'] else 'FAIL'} on {pos['checked']} epsilons")
    if "metric_axioms" in st:
        ax = st["metric_axioms"]
        lines.append(f"  metric axioms: {ax['status']} ({ax['points']} points)")
        if ax["status"] == "fail":
            lines.append(f"    {ax['axiom']} violated at {ax['witness']}: {ax['detail']}")
    if "injectivity" in st:
        inj = st["injectivity"]
        lines.append(f"  T injectivity (sampled): {'pass' if inj['passed'] else 'FAIL'} ({inj['points']} points)")
        if inj["witness"]:
            lines.append(f"    witness pair {inj['witness']}")
    if "certificate" in st:
        c = st["certificate"]
        lines.append(
            f"  certificate: {c['verdict']} at k = {c['k']}; estimated k = {_fmt(c['estimated_k'])} "
            f"over {c['pairs_defined']}/{c['pairs_checked']} pairs (seed {c['seed']}, sampled evidence)"
        )
        if c["witness_best"]:
            w = c["witness_best"]
            lines.append(f"    extremal pair ({_fmt(w['x'])}, {_fmt(w['y'])}) ratio {_fmt(w['ratio'])}")
        if c["witness_violation"]:
            w = c["witness_violation"]
            lines.append(
                f"    violation at ({_fmt(w['x'])}, {_fmt(w['y'])}): "
                f"lhs {_fmt(w['lhs_integral'])} > k * rhs {_fmt(c['k'] * w['rhs_integral'])}"
            )
    if "falsify" in st:
        f = st["falsify"]
        w = f["witness"]
        tag = "witness found" if f["found"] else "no witness (best pair shown)"
        lines.append(f"  falsify: {tag} after {f['evaluations']} evaluations, {f['restarts']} restarts")
        if w:
            lines.append(f"    pair ({_fmt(w['x'])}, {_fmt(w['y'])}) ratio {_fmt(w['ratio'])}")
    if "solve" in st:
        s = st["solve"]
        lines.append(
            f"  solve: {s['status']} after {s['iterations']} iterations; "
            f"b = {_fmt(s['fixed_point'])}, residual = {_fmt(s['residual'])}, T(b) limit a = {_fmt(s['t_limit'])}"
        )
        if s["reason"]:
            lines.append(f"    {s['reason']}")
    for key, label in (("step1", "step distances decay"), ("step2_step3", "orbit bounded and Cauchy")):
        if key in st:
            lines.append(f"  {label}: {'pass' if st[key]['passed'] else 'FAIL'} ({st[key]['checked']} points)")
    if "uniqueness" in st:
        u = st["uniqueness"]
        lines.append(f"  uniqueness: {u['status']} over probes {u['probes']} -> {[_fmt(v) for v in u['limits']]}")
    if "posthoc" in st:
        lines.append(f"  T convergence: {st['posthoc']['message']}")
    for err in report.errors:
        lines.append(f"  ERROR in {err['stage']}: {err['message']}")
    if report.hypothesis_failures:
        lines.append(f"  hypothesis failures: {', '.join(report.hypothesis_failures)}")
    if report.conclusion:
        lines.append(f"  conclusion: {report.conclusion}")
    return "\n".join(lines) + "\n"
