"""Command-line entry point: ``intfix {certify,falsify,solve,full} <problem.json>``.

Exit codes: 0 completed (whatever the verdicts), 1 usage error,
2 problem-file error, 3 runtime evaluation failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .contraction import CertificationError, certify, falsify
from .expr import DomainError
from .gauge import QuadratureError, check_positivity, default_epsilons
from .problem import Problem, ProblemError, load_problem, problem_to_dict
from .report import HEURISTIC, THEOREM_APPLIES, Report, render_text, to_jsonable
from .solver import (
    check_step1,
    check_step2_step3,
    check_uniqueness,
    iterate,
    posthoc_convergence_check,
)
from .space import check_metric_axioms, sanity_check_injectivity

__all__ = ["RunOptions", "run_certify", "run_falsify", "run_solve", "run_full", "main"]

log = logging.getLogger("intfix")

EXIT_OK, EXIT_USAGE, EXIT_PROBLEM, EXIT_RUNTIME = 0, 1, 2, 3
_RUNTIME_ERRORS = (DomainError, QuadratureError, CertificationError, ArithmeticError, ValueError)


@dataclass(frozen=True)
class RunOptions:
    budget: int = 5000  # falsify evaluations
    axiom_points: int = 50
    injectivity_points: int = 200


class _Stages:
    """Times each stage and turns evaluation failures into report errors."""

    def __init__(self, report: Report):
        self.report = report

    def run(self, name: str, fn: Callable[[], object]):
        t0 = time.perf_counter()
        try:
            return fn()
        except CertificationError as exc:
            self.report.add(name, exc.partial)
            self.report.errors.append({"stage": name, "message": str(exc)})
        except _RUNTIME_ERRORS as exc:
            self.report.errors.append({"stage": name, "message": str(exc)})
        finally:
            self.report.timing[name] = time.perf_counter() - t0
        return None


def _new_report(command: str, problem: Problem) -> Report:
    s = problem.sampling
    return Report(command, problem_to_dict(problem), options={"seed": s.seed, "pairs": s.n_pairs})


def _diameter_hint(problem: Problem) -> float:
    lo, hi = problem.space.window()
    d = problem.space.distance(lo, hi)
    try:
        d = max(d, problem.space.distance(problem.T(lo), problem.T(hi)))
    except DomainError:
        pass
    return d if math.isfinite(d) and d > 0 else 1.0


def _certify_stage(report: Report, stages: _Stages, problem: Problem):
    cert = stages.run("certificate", lambda: certify(problem, problem.sampling.n_pairs, problem.sampling.seed))
    if cert is not None:
        report.add("certificate", cert)
    return cert


def _solve_stages(report: Report, stages: _Stages, problem: Problem, cert=None):
    config = problem.solver_config()
    out = stages.run("solve", lambda: iterate(problem, config))
    if out is None:
        return None
    trace, result = out
    report.add("solve", result)
    report.add("orbit", {
        "s_orbit": trace.s_orbit,
        "t_orbit": trace.t_orbit,
        "step_distances": trace.step_distances,
        "diameter_estimate": trace.diameter_estimate,
    })
    certified_k = cert.k if cert is not None and cert.verdict == "certified-at-k" else None
    step1 = stages.run(
        "step1", lambda: check_step1(trace, certified_k, problem.cumulative, tol=config.tol)
    )
    if step1 is not None:
        report.add("step1", step1)
    step23 = stages.run("step2_step3", lambda: check_step2_step3(trace, problem.space.distance, tol=config.tol))
    if step23 is not None:
        report.add("step2_step3", step23)
    uniq = None
    if result.converged:
        uniq = stages.run("uniqueness", lambda: check_uniqueness(problem, config))
        if uniq is not None:
            report.add("uniqueness", uniq)
    note = posthoc_convergence_check(trace, result, problem.T_properties, problem.T.is_identity)
    report.add("posthoc", note)
    return result, step1, step23, uniq


def run_certify(problem: Problem, options: RunOptions | None = None) -> Report:
    report = _new_report("certify", problem)
    _certify_stage(report, _Stages(report), problem)
    return report


def run_falsify(problem: Problem, options: RunOptions | None = None) -> Report:
    options = options or RunOptions()
    report = _new_report("falsify", problem)
    report.options["budget"] = options.budget
    res = _Stages(report).run("falsify", lambda: falsify(problem, options.budget, problem.sampling.seed))
    if res is not None:
        report.add("falsify", res)
    return report


def run_solve(problem: Problem, options: RunOptions | None = None) -> Report:
    report = _new_report("solve", problem)
    _solve_stages(report, _Stages(report), problem)
    return report


def run_full(problem: Problem, options: RunOptions | None = None) -> Report:
    """Hypothesis checks in order, then the conclusion; any failed check downgrades the label."""
    options = options or RunOptions()
    report = _new_report("full", problem)
    stages = _Stages(report)
    seed = problem.sampling.seed
    failures = report.hypothesis_failures

    pos = stages.run("positivity", lambda: check_positivity(problem.gauge, default_epsilons(_diameter_hint(problem))))
    if pos is not None:
        report.add("positivity", {**to_jsonable(pos), "passed": pos.passed, "checked": pos.checked})
        if not pos.passed:
            failures.append("gauge positivity")

    ax = stages.run("metric_axioms", lambda: check_metric_axioms(problem.space, options.axiom_points, seed))
    if ax is not None:
        report.add("metric_axioms", ax)
        if ax.status == "fail":
            failures.append("metric axioms")

    inj = stages.run(
        "injectivity",
        lambda: sanity_check_injectivity(problem.T, problem.space, options.injectivity_points, seed),
    )
    if inj is not None:
        report.add("injectivity", inj)
        if not inj.passed:
            failures.append("T injectivity")
    if not problem.T_properties.theorem_hypotheses_declared:
        failures.append("T properties not declared (one-to-one, continuous, subsequentially convergent)")

    cert = _certify_stage(report, stages, problem)
    if cert is None or cert.verdict != "certified-at-k":
        failures.append("contractive condition")

    solved = _solve_stages(report, stages, problem, cert)
    if solved is None:
        failures.append("solve")
    else:
        result, step1, step23, uniq = solved
        if not result.converged:
            failures.append("solve")
        if step1 is None or not step1.passed:
            failures.append("step distances decay")
        if step23 is None or not step23.passed:
            failures.append("orbit bounded and Cauchy")
        if uniq is None or uniq.status != "pass":
            failures.append("uniqueness")

    report.conclusion = HEURISTIC if failures or report.errors else THEOREM_APPLIES
    return report


# --- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem JSON file, or the name of a bundled fixture")
    common.add_argument("--seed", type=int, help="sampling seed (overrides the file)")
    common.add_argument("--pairs", type=int, help="number of pairs to certify (overrides the file)")
    common.add_argument("--tol", type=float, help="solver tolerance on T-image step distances")
    common.add_argument("--max-iter", type=int, help="solver iteration cap")
    common.add_argument("--budget", type=int, default=5000, help="falsify evaluation budget")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--quiet", action="store_true", help="suppress the text report")

    parser = _Parser(prog="intfix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, helptext in (
        ("certify", "check the contractive condition over sampled pairs"),
        ("falsify", "search for a pair violating the contractive condition"),
        ("solve", "run the iteration and the convergence diagnostics"),
        ("full", "all hypothesis checks, then solve"),
    ):
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


RUNNERS = {"certify": run_certify, "falsify": run_falsify, "solve": run_solve, "full": run_full}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.budget < 1 or (args.pairs is not None and args.pairs < 1):
        parser.print_usage(sys.stderr)
        print("intfix: error: --budget and --pairs must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    overrides = {"seed": args.seed, "n_pairs": args.pairs, "tol": args.tol, "max_iter": args.max_iter}
    try:
        problem = load_problem(args.file, overrides)
    except ProblemError as exc:
        print(f"intfix: problem file error: {exc}", file=sys.stderr)
        return EXIT_PROBLEM

    t0 = time.perf_counter()
    report = RUNNERS[args.command](problem, RunOptions(budget=args.budget))
    report.timing["total"] = time.perf_counter() - t0

    if args.out:
        report.write(args.out)
    if not args.quiet:
        sys.stdout.write(render_text(report))
    return EXIT_RUNTIME if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
