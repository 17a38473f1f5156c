"""Crossover roots and the critical point, for both ECS forms."""

import argparse

from ecsqfi.crossover import CrossoverMode, critical_point, crossover_roots, fitted_boundaries


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t", type=float, nargs="*", default=[0.86, 0.87, 0.9, 0.95, 0.99])
    p.add_argument("--tol", type=float, default=1e-7)
    args = p.parse_args()

    for mode in CrossoverMode:
        t_c, n_c = critical_point(args.tol, mode)
        print(f"[{mode.value}] critical point T_c = {t_c:.6f}, n_c = {n_c:.4f}")
        print(f"{'T':>6} {'lower':>10} {'upper':>10} {'fit_lo':>10} {'fit_up':>10}")
        for t in args.t:
            roots = crossover_roots(t, mode, search_max=1e5).roots
            up, lo = fitted_boundaries(t)
            cells = [f"{r:10.4f}" for r in roots] or [f"{'-':>10}", f"{'-':>10}"]
            print(f"{t:6.3f} {' '.join(cells)} {lo:10.4f} {up:10.4f}")
        print()


if __name__ == "__main__":
    main()
