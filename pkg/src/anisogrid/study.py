"""Convergence studies, index-set reports and reference computations.

Every result is a list of row dicts that can be written as CSV with
:func:`write_csv`; numbers are printed with 17 significant digits so reruns
are bit-identical.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._errors import InvalidArgumentError
from .gauss1d import build_family
from .indexset import (
    WeightVector,
    _as_weights,
    bound_bd,
    bound_loglog,
    bound_sg,
    bound_tp,
    cardinality_X,
    cost_exact,
    enumerate_Y,
    max_box_volume,
    max_level,
)
from .model_problems import (
    AnalyticProblem,
    DiffusionConfig,
    algebraic_profile,
    build_diffusion_model,
    h1_relative_error,
    moments_integrand,
    split_moments,
)
from .qmc import qmc_estimates
from .sparse_quad import build_combination_quadrature, count_distinct_points, dump_grid

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class AnalyticSpec:
    r: float = 2.0
    m: int = 10


@dataclass(frozen=True)
class StudyConfig:
    """Convergence study set-up.

    ``reference`` is ``"self"`` (sparse grid at ``q_ref``, default
    ``q_max + 8``) or ``"qmc"`` (first ``2**log2_n`` Halton points).  The level
    schedule runs from ``q_start`` in steps of ``q_step`` and stops after
    ``q_max`` or before the first level whose cost exceeds ``max_points``.
    """

    problem: AnalyticSpec | DiffusionConfig = field(default_factory=AnalyticSpec)
    moments: int = 4
    q_start: float = 0.0
    q_max: float = 40.0
    q_step: float = 1.0
    max_points: int | None = 30_000
    reference: str = "self"
    q_ref: float | None = None
    log2_n: int = 18
    profile: str = "tensor"
    delta: float = 1.0
    out: str | None = None
    dump_grid: str | None = None

    def __post_init__(self):
        if self.q_step <= 0:
            raise InvalidArgumentError(f"level step must be positive, got {self.q_step}")
        if self.q_max < self.q_start:
            raise InvalidArgumentError("empty level schedule")
        if self.reference not in ("self", "qmc"):
            raise InvalidArgumentError(f"unknown reference {self.reference!r}")
        if self.reference == "self" and self.q_ref is not None and self.q_ref <= self.q_max:
            raise InvalidArgumentError("self reference level must exceed q_max")
        if self.log2_n < 1:
            raise InvalidArgumentError("need at least two QMC samples")

    @property
    def is_diffusion(self) -> bool:
        return isinstance(self.problem, DiffusionConfig)


@dataclass
class StudyResult:
    rows: list[dict]
    slopes: dict[str, float]
    floors: dict[str, float]
    reference: np.ndarray
    meta: dict

    def comments(self) -> list[str]:
        lines = [f"{k}={v}" for k, v in self.meta.items()]
        lines += [f"floor_{k}={_fmt(v)}" for k, v in self.floors.items()]
        lines += [f"slope_{k}={_fmt(v)}" for k, v in self.slopes.items()]
        return lines


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(rows: Sequence[dict], path=None, comments: Sequence[str] = ()) -> str:
    """Write rows with a header to ``path`` (``None`` or ``"-"`` for stdout)."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return text


def fit_slope(n_points: Sequence[float], errors: Sequence[float], floor: float = 0.0) -> float:
    """Least-squares slope of ``log(error)`` against ``log(N)`` over rows with
    ``error > 10 * floor``; ``nan`` when fewer than two distinct ``N`` remain."""
    n = np.asarray(n_points, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = (e > 10.0 * floor) & (e > 0) & (n > 0)
    if len(np.unique(n[keep])) < 2:
        return math.nan
    return float(np.polyfit(np.log(n[keep]), np.log(e[keep]), 1)[0])


def level_schedule(config: StudyConfig, w: WeightVector) -> list[float]:
    qs = []
    k = 0
    while True:
        q = config.q_start + k * config.q_step
        if q > config.q_max + 1e-12:
            break
        if config.max_points is not None and cost_exact(w, q) > config.max_points:
            break
        qs.append(q)
        k += 1
    if not qs:
        raise InvalidArgumentError("level schedule is empty under the point cap")
    return qs


class _Problem:
    """Integrand, weights and error metric of a study."""

    def __init__(self, config: StudyConfig):
        self.config = config
        spec = config.problem
        if config.is_diffusion:
            self.model = build_diffusion_model(spec)
            self.integrand = moments_integrand(self.model, config.moments)
            self.weights = self.model.profile(config.profile, config.delta).weight_vector
            self.names = [f"m{p}" for p in range(1, config.moments + 1)]
        else:
            problem = AnalyticProblem(spec.r, spec.m)
            self.integrand = problem.integrand()
            self.weights = algebraic_profile(spec.r, spec.m).weight_vector
            self.names = ["linf"]

    def errors(self, value: np.ndarray, reference: np.ndarray) -> dict[str, float]:
        if self.config.is_diffusion:
            pairs = zip(split_moments(value, self.config.moments), split_moments(reference, self.config.moments))
            return {n: float(h1_relative_error(v, r)) for n, (v, r) in zip(self.names, pairs)}
        scale = np.max(np.abs(reference))
        return {"linf": float(np.max(np.abs(value - reference)) / scale)}

    def meta(self) -> dict:
        c = self.config
        out = {"problem": "diffusion" if c.is_diffusion else "analytic"}
        out.update({k: v for k, v in asdict(c.problem).items() if v is not None})
        if c.is_diffusion:
            out["dim"] = self.model.dim
            out["moments"] = c.moments
            out["profile"] = c.profile
        return out


def _sparse_value(problem: _Problem, q: float) -> tuple[np.ndarray, object]:
    quad = build_combination_quadrature(problem.weights, q)
    return quad.apply(problem.integrand), quad


def _compute_reference(problem: _Problem, config: StudyConfig, q_max: float):
    """Reference vector, per-quantity noise floors and provenance."""
    if config.reference == "qmc":
        n = 1 << config.log2_n
        half, full = qmc_estimates(problem.integrand, [n // 2, n], batch_size=1 << 12)
        floors = problem.errors(half, full)
        return full, floors, {"reference": "qmc", "log2_n": config.log2_n}
    q_ref = config.q_ref if config.q_ref is not None else q_max + 8
    full, _ = _sparse_value(problem, q_ref)
    prev, _ = _sparse_value(problem, q_ref - 1)
    floors = {k: float(max(v, 100 * _EPS)) for k, v in problem.errors(prev, full).items()}
    return full, floors, {"reference": "self", "q_ref": q_ref}


def run_convergence_study(config: StudyConfig) -> StudyResult:
    """Relative errors of the sparse grid quadrature along the level schedule.

    Columns: ``q``, ``N_points`` (function evaluations of the sparse
    operator), ``n_eval`` (points with nonzero aggregated weight), ``card_X``
    and one ``err_*`` column per output quantity.
    """
    problem = _Problem(config)
    w = problem.weights
    qs = level_schedule(config, w)
    reference, floors, ref_meta = _compute_reference(problem, config, qs[-1])
    rows = []
    quad = None
    for q in qs:
        value, quad = _sparse_value(problem, q)
        row = {
            "q": float(q),
            "N_points": cost_exact(w, q),
            "n_eval": quad.n_points,
            "card_X": cardinality_X(w, q),
        }
        row.update({f"err_{k}": v for k, v in problem.errors(value, reference).items()})
        rows.append(row)
    if config.dump_grid and quad is not None:
        dump_grid(quad, config.dump_grid)
    n = [r["N_points"] for r in rows]
    slopes = {k: fit_slope(n, [r[f"err_{k}"] for r in rows], floors[k]) for k in problem.names}
    meta = problem.meta() | ref_meta
    result = StudyResult(rows, slopes, floors, reference, meta)
    if config.out:
        write_csv(rows, config.out, result.comments())
    return result


def run_indexset_report(
    weights, qs: Sequence[float], m: int | None = None, r: float | None = None, y_union: bool = True
) -> list[dict]:
    """Cardinality, bounds and cost of ``X_w(q, m)`` for each ``q``.

    ``bound_loglog`` needs ``r`` and ``m >= 3`` and is ``nan`` otherwise.
    """
    w = _as_weights(weights, m)
    m = len(w)
    rows = []
    for q in qs:
        family = build_family(max_level(w, q))
        card = cardinality_X(w, q)
        row = {
            "q": float(q),
            "card_X": card,
            "card_Y": len(enumerate_Y(w, q)),
            "bound_sg": bound_sg(w, q),
            "bound_bd": bound_bd(w, q),
            "bound_tp": bound_tp(w, q),
            "bound_loglog": bound_loglog(q, m, r) if r is not None and m >= 3 else math.nan,
            "max_box": max_box_volume(w, q),
            "cost_exact": cost_exact(w, q, family=family),
            "cost_sq": card * card,
        }
        if y_union:
            row["points_Y_union"] = count_distinct_points(w, q, family=family, over="Y")
        rows.append(row)
    return rows


def run_reference(config: StudyConfig, path=None) -> tuple[np.ndarray, list[str]]:
    """Reference vector for ``config`` with provenance comment lines.

    Writes one value per line to ``path`` (stdout for ``"-"``) when given.
    """
    problem = _Problem(config)
    if config.reference == "qmc":
        value = qmc_estimates(problem.integrand, [1 << config.log2_n], batch_size=1 << 12)[0]
        prov = {"method": "qmc-halton", "log2_n": config.log2_n}
    else:
        if config.q_ref is None:
            raise InvalidArgumentError("self reference needs q_ref")
        value, _ = _sparse_value(problem, config.q_ref)
        prov = {"method": "sparse", "q_ref": config.q_ref}
    comments = [f"{k}={v}" for k, v in (problem.meta() | prov).items()]
    if path is not None:
        text = "".join(f"# {c}\n" for c in comments) + "".join(f"{v:.17g}\n" for v in value)
        if str(path) == "-":
            sys.stdout.write(text)
        else:
            try:
                Path(path).write_text(text)
            except OSError as exc:
                raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return value, comments


def load_reference(path) -> np.ndarray:
    try:
        return np.loadtxt(path, comments="#", ndmin=1)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
