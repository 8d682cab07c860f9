"""Measure adaptive Simpson error against closed forms over random upper limits."""

import argparse

import numpy as np

from intfix.gauge import Gauge, integrate

CASES = {
    "1": lambda u: u,
    "2*x": lambda u: u * u,
    "x^2": lambda u: u**3 / 3,
    "1/(1+x)^2": lambda u: u / (1 + u),
    "exp(-x)": lambda u: 1 - np.exp(-u),
    "max(0, x - 1)": lambda u: 0.5 * max(u - 1, 0.0) ** 2,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    us = np.random.default_rng(args.seed).uniform(0.0, 10.0, args.n).tolist()
    for src, exact in CASES.items():
        g = Gauge.from_source(src)
        err = max(abs(integrate(g, u) - exact(u)) for u in us)
        print(f"{src:>16}: max abs error {err:.3e}")


if __name__ == "__main__":
    main()
