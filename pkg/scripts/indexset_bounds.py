"""Cardinality of weighted index sets against the product bounds.

Uses the weights ``log(n^r + sqrt(1 + n^(2r)))`` of algebraically decaying
problems and writes one CSV row per level.

    python3 scripts/indexset_bounds.py --m 100 --r 2 --q-max 12
"""

import argparse

import numpy as np

from anisogrid.model_problems import algebraic_profile
from anisogrid.study import run_indexset_report, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=100)
    parser.add_argument("--r", type=float, default=2.0)
    parser.add_argument("--q-max", type=float, default=12.0)
    parser.add_argument("--q-step", type=float, default=1.0)
    parser.add_argument("--y-union", action="store_true", help="also count distinct combination grid points")
    parser.add_argument("--out", default="-")
    args = parser.parse_args()

    weights = algebraic_profile(args.r, args.m).quad_weights
    qs = np.arange(0.0, args.q_max + 1e-9, args.q_step)
    rows = run_indexset_report(weights, qs, r=args.r, y_union=args.y_union)
    write_csv(rows, args.out, [f"weights=algebraic r={args.r:g} m={args.m}"])


if __name__ == "__main__":
    main()
