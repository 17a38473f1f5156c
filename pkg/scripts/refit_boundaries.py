"""Least-squares power-law fits of the crossover boundaries.

Fits ln n = ln c + p ln T + q ln R to the solved roots and prints the
coefficients next to the published (3.2, 6, -1.15) and (1.4, -3, -0.5).
Diagnostic only.
"""

import argparse

import numpy as np

from ecsqfi.crossover import CrossoverMode, crossover_roots


def fit(t, n):
    x = np.column_stack([np.ones_like(t), np.log(t), np.log(1 - t)])
    coef, *_ = np.linalg.lstsq(x, np.log(n), rcond=None)
    return np.exp(coef[0]), coef[1], coef[2]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t-min", type=float, default=0.86)
    p.add_argument("--t-max", type=float, default=0.995)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--mode", choices=[m.value for m in CrossoverMode], default="approx")
    args = p.parse_args()

    ts, lows, ups = [], [], []
    for t in np.linspace(args.t_min, args.t_max, args.points):
        roots = crossover_roots(float(t), CrossoverMode(args.mode), search_max=1e5).roots
        if len(roots) == 2:
            ts.append(t)
            lows.append(roots[0])
            ups.append(roots[1])
    ts = np.array(ts)
    for name, vals, pub in (("upper", ups, (3.2, 6, -1.15)), ("lower", lows, (1.4, -3, -0.5))):
        c, pt, qr = fit(ts, np.array(vals))
        print(f"{name}: n = {c:.3f} T^{pt:.3f} R^{qr:.3f}   (published {pub[0]} T^{pub[1]} R^{pub[2]})")


if __name__ == "__main__":
    main()
