"""Sweep k for the rhoades preset and report falsification cost per seed."""

import argparse
import time

import numpy as np

from intfix.contraction import falsify
from intfix.problem import load_problem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--budget", type=int, default=5000)
    args = ap.parse_args()

    base = load_problem("example_2_3_rhoades.json")
    print(f"{'k':>6} {'found':>6} {'median evals':>13} {'min ratio':>10} {'time':>7}")
    for k in (0.0, 0.5, 0.9, 0.99, 0.999):
        p = base.with_preset("rhoades", k)
        t0 = time.perf_counter()
        runs = [falsify(p, args.budget, seed) for seed in range(args.seeds)]
        dt = time.perf_counter() - t0
        found = sum(r.found for r in runs)
        evals = np.median([r.evaluations for r in runs])
        ratio = min(r.ratio for r in runs)
        print(f"{k:>6} {found:>3}/{args.seeds:<2} {evals:>13.0f} {ratio:>10.6f} {dt:>6.2f}s")


if __name__ == "__main__":
    main()
