"""Rastrigin benchmark over d = 2, 5, 10 with N = 500d and N0 = 150d.

    python scripts/rastrigin_tables.py --reps 100 --out results/rastrigin
"""

import argparse
import sys

from rtsopt.cli import main as rtsopt_main


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 5, 10])
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/rastrigin")
    args = ap.parse_args()
    for d in args.dims:
        print(f"\n== Rastrigin d={d} ==")
        code = rtsopt_main([
            "run", "--objective", "rastrigin", "--dim", str(d), "--sense", "min",
            "--budget", str(500 * d), "--n0", str(150 * d), "--reps", str(args.reps),
            "--seed", str(args.seed), "--baseline", "uniform_random",
            "--workers", str(args.workers), "--out", f"{args.out}/d{d}",
        ])
        if code:
            sys.exit(code)


if __name__ == "__main__":
    main()
