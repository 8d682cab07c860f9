"""Brute-force grid scan of the contraction ratio for the log/sqrt fixture.

Compares the T-image (moradi preset) ratio (expected sup 1/2, attained along the orbit) with
the rhoades ratio (exceeds 1 near x = 1) on a uniform grid, with phi = 1 so
no quadrature is involved.
"""

import argparse

import numpy as np

S = lambda x: 4.0 * np.sqrt(x)  # noqa: E731
T = lambda x: 1.0 + np.log(x)  # noqa: E731


def m_terms(a, b, sa, sb):
    return np.maximum.reduce([abs(a - b), abs(a - sa), abs(b - sb), (abs(a - sb) + abs(b - sa)) / 2])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1500, help="grid points per axis")
    ap.add_argument("--hi", type=float, default=100.0)
    args = ap.parse_args()

    g = np.linspace(1.0, args.hi, args.n)
    x, y = np.meshgrid(g, g, indexing="ij")
    off = x < y
    x, y = x[off], y[off]

    sx, sy = S(x), S(y)
    rh = abs(sx - sy) / m_terms(x, y, sx, sy)
    tx, ty, tsx, tsy = T(x), T(y), T(sx), T(sy)
    mo = abs(tsx - tsy) / m_terms(tx, ty, tsx, tsy)

    for name, r in (("moradi", mo), ("rhoades", rh)):
        i = int(np.argmax(r))
        print(f"{name:>8}: sup ratio {r[i]:.12f} at ({x[i]:.6f}, {y[i]:.6f}) over {r.size} pairs")


if __name__ == "__main__":
    main()
