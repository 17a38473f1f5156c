"""Relative deviation of the exact lossy-ECS QFI from 2nT where R n >= 20.

Shows where the strong-loss limit 2nT is reached to 1% and where the
residual branch overlap e^{-T|a|^2} still matters (small nT).
"""

import argparse

import numpy as np

from ecsqfi.closed_forms import ecs_lossy_qfi
from ecsqfi.fock import build_ecs_rho_analytic
from ecsqfi.model import LossChannel, ecs_from_mean_photons
from ecsqfi.qfi import qfi_spectral


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nbar", type=float, nargs="*", default=[25, 30, 40, 50, 59])
    p.add_argument("--r", type=float, nargs="*", default=[0.4, 0.6, 0.8, 0.9, 0.95, 0.99])
    p.add_argument("--oracle", action="store_true", help="use the Fock-space spectral value")
    args = p.parse_args()

    print("n \\ R " + "".join(f"{r:>10g}" for r in args.r))
    for n in args.nbar:
        spec = ecs_from_mean_photons(n)
        cells = []
        for r in args.r:
            ch = LossChannel.from_loss(r)
            if r * n < 20:
                cells.append(f"{'':>10}")
                continue
            if args.oracle:
                f = qfi_spectral(build_ecs_rho_analytic(spec, ch, 0.7))
            else:
                f = ecs_lossy_qfi(spec, ch).total
            target = 2 * n * ch.transmission
            cells.append(f"{(f - target) / target:>10.2%}")
        print(f"{n:<6g}" + "".join(cells))
    print("\nnT at each column for n = 25:", np.round([25 * (1 - r) for r in args.r], 3).tolist())


if __name__ == "__main__":
    main()
