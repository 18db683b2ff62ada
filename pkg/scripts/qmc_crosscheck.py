"""Compare a fine sparse grid reference with Halton estimates of growing size.

    python3 scripts/qmc_crosscheck.py --r 3 --m 10 --q-ref 32 --log2-n 20
"""

import argparse

from anisogrid.model_problems import analytic_integrand
from anisogrid.qmc import qmc_estimates
from anisogrid.study import AnalyticSpec, StudyConfig, run_reference, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--r", type=float, default=3.0)
    parser.add_argument("--m", type=int, default=10)
    parser.add_argument("--q-ref", type=float, default=32.0)
    parser.add_argument("--log2-n", type=int, default=20)
    parser.add_argument("--out", default="-")
    args = parser.parse_args()

    cfg = StudyConfig(problem=AnalyticSpec(args.r, args.m), reference="self", q_ref=args.q_ref, q_max=0.0)
    ref, _ = run_reference(cfg)
    sizes = [1 << k for k in range(4, args.log2_n + 1)]
    ests = qmc_estimates(analytic_integrand(args.r, args.m), sizes)
    rows = [{"N": n, "qmc": e[0], "rel_error": abs(e[0] - ref[0]) / abs(ref[0])} for n, e in zip(sizes, ests)]
    write_csv(rows, args.out, [f"sparse reference q_ref={args.q_ref:g}: {ref[0]:.17g}"])


if __name__ == "__main__":
    main()
