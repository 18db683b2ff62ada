"""Command-line driver writing experiment data as CSV.

Exit status is 0 on success, 2 for invalid arguments and 3 when a
numerical guard trips.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ._errors import InvalidArgumentError, NumericalGuardError
from .gauss1d import build_family
from .model_problems import DiffusionConfig
from .study import (
    AnalyticSpec,
    StudyConfig,
    run_convergence_study,
    run_indexset_report,
    run_reference,
    write_csv,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _read_weights(path: str) -> list[float]:
    try:
        text = open(path).read()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read weights file {path}: {exc.strerror}") from None
    tokens = text.replace(",", " ").split()
    try:
        weights = [float(t) for t in tokens if not t.startswith("#")]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad weights file {path}: {exc}") from None
    if not weights:
        raise InvalidArgumentError(f"weights file {path} is empty")
    return weights


def cmd_rules(args) -> None:
    family = build_family(args.level)
    rule = family.rule(args.level)
    rows = [{"index": i, "node": float(x), "weight": float(w)}
            for i, (x, w) in enumerate(zip(rule.nodes, rule.weights))]
    write_csv(rows, args.out)


def cmd_indexset_stats(args) -> None:
    weights = _read_weights(args.weights)
    q_max = args.q if args.q_max is None else args.q_max
    if args.q_step <= 0:
        raise InvalidArgumentError("--q-step must be positive")
    n = int(np.floor((q_max - args.q) / args.q_step + 1e-9)) + 1
    if n < 1:
        raise InvalidArgumentError("--q-max is below --q")
    qs = [args.q + k * args.q_step for k in range(n)]
    rows = run_indexset_report(weights, qs, r=args.r, y_union=args.y_union)
    write_csv(rows, args.out)


def _problem(args):
    if args.problem == "analytic":
        return AnalyticSpec(args.r, args.m)
    return DiffusionConfig(
        nu=args.nu, ell=args.ell, mean=args.mean, h_exponent=args.h_exponent, trace_tol=args.trace_tol
    )


def cmd_qmc_reference(args) -> None:
    config = StudyConfig(problem=_problem(args), moments=args.moments, reference="qmc", log2_n=args.log2_n)
    run_reference(config, args.out)


def _study(args, problem, reference):
    return StudyConfig(
        problem=problem,
        moments=getattr(args, "moments", 1),
        q_start=args.q_start,
        q_max=args.q_max,
        q_step=args.q_step,
        max_points=args.max_points if args.max_points > 0 else None,
        reference=reference,
        q_ref=getattr(args, "q_ref", None),
        log2_n=getattr(args, "log2_n", 18),
        profile=getattr(args, "profile", "tensor"),
        delta=getattr(args, "delta", 1.0),
        out=None,
        dump_grid=args.dump_grid,
    )


def _emit(result, out) -> None:
    write_csv(result.rows, out, result.comments())


def cmd_converge_analytic(args) -> None:
    _emit(run_convergence_study(_study(args, AnalyticSpec(args.r, args.m), "self")), args.out)


def cmd_converge_diffusion(args) -> None:
    problem = DiffusionConfig(
        nu=args.nu, ell=args.ell, mean=args.mean, h_exponent=args.h_exponent, trace_tol=args.trace_tol
    )
    _emit(run_convergence_study(_study(args, problem, "qmc")), args.out)


def _add_analytic(p) -> None:
    p.add_argument("--r", type=float, default=2.0, help="decay exponent")
    p.add_argument("--m", type=int, default=10, help="dimension")


def _add_diffusion(p) -> None:
    p.add_argument("--nu", type=float, default=2.5, choices=[2.5, 3.5], help="Matern smoothness")
    p.add_argument("--ell", type=float, default=0.5, help="correlation length")
    p.add_argument("--mean", type=float, default=2.5, help="mean of the coefficient")
    p.add_argument("--h-exponent", type=int, default=9, help="mesh size 2^-k")
    p.add_argument("--trace-tol", type=float, default=1e-8, help="relative KL trace tolerance")
    p.add_argument("--moments", type=int, default=4, help="highest moment order (1..4)")


def _add_schedule(p, q_max: float) -> None:
    p.add_argument("--q-start", type=float, default=0.0)
    p.add_argument("--q-max", type=float, default=q_max)
    p.add_argument("--q-step", type=float, default=1.0)
    p.add_argument("--max-points", type=int, default=30_000, help="stop before levels above this cost (0: no cap)")
    p.add_argument("--out", default="-", help="CSV output path (default stdout)")
    p.add_argument("--dump-grid", default=None, metavar="FILE", help="write the finest sparse grid as CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisogrid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rules", help="nodes and weights of one level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("indexset", help="index-set statistics")
    isub = p.add_subparsers(dest="action", required=True)
    s = isub.add_parser("stats", help="cardinalities, bounds and costs per level")
    s.add_argument("--weights", required=True, metavar="FILE", help="whitespace or comma separated weights")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--q-max", type=float, default=None)
    s.add_argument("--q-step", type=float, default=1.0)
    s.add_argument("--r", type=float, default=None, help="decay exponent for the log(m)^(q/r) column")
    s.add_argument("--no-y-union", dest="y_union", action="store_false",
                   help="skip the distinct-point count over the combination grids")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_indexset_stats)

    p = sub.add_parser("qmc", help="quasi-Monte Carlo references")
    qsub = p.add_subparsers(dest="action", required=True)
    s = qsub.add_parser("reference", help="Halton reference vector, one value per line")
    s.add_argument("--problem", choices=["analytic", "diffusion"], required=True)
    _add_analytic(s)
    _add_diffusion(s)
    s.add_argument("--log2-n", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_qmc_reference)

    p = sub.add_parser("converge", help="convergence studies")
    csub = p.add_subparsers(dest="problem", required=True)
    s = csub.add_parser("analytic", help="rational integrand against a finer sparse grid")
    _add_analytic(s)
    _add_schedule(s, q_max=40.0)
    s.add_argument("--q-ref", type=float, default=None, help="reference level (default q_max + 8)")
    s.set_defaults(func=cmd_converge_analytic)
    s = csub.add_parser("diffusion", help="random diffusion moments against a Halton reference")
    _add_diffusion(s)
    _add_schedule(s, q_max=40.0)
    s.add_argument("--log2-n", type=int, default=18)
    s.add_argument("--profile", choices=["tensor", "theoretical"], default="tensor")
    s.add_argument("--delta", type=float, default=1.0)
    s.set_defaults(func=cmd_converge_diffusion)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalGuardError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
