"""Run the full pipeline on a fixture and print the orbit head and verdicts."""

import argparse

from intfix.cli import RunOptions, run_full
from intfix.problem import list_fixtures, load_problem
from intfix.report import render_text, report_verdicts


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("fixture", nargs="?", default="example_2_3.json", choices=list_fixtures())
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pairs", type=int)
    args = ap.parse_args()

    problem = load_problem(args.fixture, {"seed": args.seed, "n_pairs": args.pairs})
    report = run_full(problem, RunOptions())
    print(render_text(report))
    for stage, verdict in report_verdicts(report).items():
        print(f"{stage:>14}: {verdict}")


if __name__ == "__main__":
    main()
