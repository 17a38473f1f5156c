"""Write the data behind every figure as CSV files into one directory."""

import argparse
import pathlib
import time

from ecsqfi import cli


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--only", choices=cli.FIGURES, nargs="*")
    args = p.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in args.only or cli.FIGURES:
        t0 = time.perf_counter()
        path = out / f"{fig}.csv"
        cli.cmd_figure(fig, str(path))
        print(f"{fig}: {path} ({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
