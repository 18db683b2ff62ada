"""Anisotropic sparse grid quadrature on [-1, 1]^m.

The operator is assembled with the combination technique: every ``alpha`` in
the boundary layer Y contributes ``c_w(alpha)`` times the tensor Gauss rule
``Q_alpha``.  Points are identified by tuples of node-registry ids, never by
coordinates, so coinciding points are merged exactly.

:func:`apply_direct_delta` evaluates the same operator by expanding the
difference operators over X and shares no assembly code with the combination
path; it exists to check it.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Callable, Sequence

import numpy as np

from ._errors import IntegrandEvaluationError, InvalidArgumentError, LevelOverflowError
from .gauss1d import RuleFamily, build_family, level_to_count
from .indexset import (
    WeightVector,
    _as_weights,
    _check_level,
    _coefficient,
    enumerate_X,
    enumerate_Y,
    in_X,
)


@dataclass(frozen=True)
class Integrand:
    """A deterministic map ``[-1, 1]^dim_in -> R^dim_out``.

    ``func`` receives a batch of points with shape ``(n, dim_in)`` and returns
    ``(n,)`` or ``(n, dim_out)``.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim_in: int
    dim_out: int = 1

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        out = np.asarray(self.func(y), dtype=float)
        return out.reshape(len(y), self.dim_out)

    @classmethod
    def pointwise(cls, f: Callable, dim_in: int, dim_out: int = 1) -> "Integrand":
        """Wrap a function of a single point."""

        def batch(y):
            return np.array([np.atleast_1d(f(row)) for row in y])

        return cls(batch, dim_in, dim_out)


def _evaluate(f: Integrand, points: np.ndarray, batch_size: int = 1 << 14) -> np.ndarray:
    vals = np.empty((len(points), f.dim_out))
    for start in range(0, len(points), batch_size):
        block = f(points[start:start + batch_size])
        bad = ~np.all(np.isfinite(block), axis=1)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise IntegrandEvaluationError(points[start + i].tolist(), block[i].tolist())
        vals[start:start + batch_size] = block
    return vals


def compensated_sum(terms: np.ndarray) -> np.ndarray:
    """Sum along axis 0 in index order with Neumaier compensation."""
    terms = np.asarray(terms, dtype=float)
    if terms.ndim == 1:
        return np.asarray(math.fsum(terms.tolist()))
    if terms.ndim == 2 and terms.shape[1] == 1:
        return np.array([math.fsum(terms[:, 0].tolist())])
    if len(terms) == 0:
        return np.zeros(terms.shape[1:])
    s = terms[0].copy()
    c = np.zeros_like(s)
    for x in terms[1:]:
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    return s + c


def _grouped_compensated_sum(values: np.ndarray, groups: np.ndarray, n_groups: int) -> np.ndarray:
    # Neumaier summation per group; contributions enter in their input order
    order = np.argsort(groups, kind="stable")
    g = groups[order]
    v = values[order]
    starts = np.searchsorted(g, np.arange(n_groups))
    rank = np.arange(len(g)) - starts[g]
    s = np.zeros(n_groups)
    c = np.zeros(n_groups)
    for k in range(int(rank.max(initial=-1)) + 1):
        sel = rank == k
        idx = g[sel]
        x = v[sel]
        si = s[idx]
        t = si + x
        c[idx] += np.where(np.abs(si) >= np.abs(x), (si - t) + x, (x - t) + si)
        s[idx] = t
    return s + c


def _canonical_level(j: int) -> int:
    # levels 2k-1 and 2k use the same rule
    return j - 1 if j > 0 and j % 2 == 0 else j


def _tensor_grid(levels: Sequence[int], family: RuleFamily):
    """Registry ids ``(P, m)`` and weight products ``(P,)`` of ``Q_levels``."""
    # only dimensions above level 0 vary; the rest sit at the midpoint with weight 1
    active = [n for n, j in enumerate(levels) if j > 0]
    ids = [family.node_ids[levels[n]] for n in active]
    wts = [family.rules[levels[n]].weights for n in active]
    sizes = [len(i) for i in ids]
    total = math.prod(sizes)
    keys = np.empty((total, len(levels)), dtype=np.int64)
    if len(levels):
        keys[:] = family.node_ids[0][0]
    inner = total
    for n, col, size in zip(active, ids, sizes):
        inner //= size
        # row-major ordering: the last active dimension varies fastest
        keys[:, n] = np.tile(np.repeat(col, inner), total // (inner * size))
    weights = reduce(np.multiply.outer, wts, np.ones(())).ravel() if wts else np.ones(1)
    return keys, weights


class _KeyCodec:
    """Orders registry-id tuples lexicographically, packing into int64 when possible."""

    def __init__(self, n_nodes: int, m: int):
        self.base = max(n_nodes, 2)
        self.packed = m * math.log2(self.base) < 62

    def unique(self, keys: np.ndarray):
        if self.packed:
            code = np.zeros(len(keys), dtype=np.int64)
            for col in range(keys.shape[1]):
                code = code * self.base + keys[:, col]
            _, first, inverse = np.unique(code, return_index=True, return_inverse=True)
        else:
            _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        return keys[first], inverse.ravel()


def _check_family(alpha, family: RuleFamily) -> None:
    if alpha and max(alpha) > family.max_level:
        raise LevelOverflowError(alpha, family.max_level)


def _default_family(w: WeightVector, q: float, family):
    if family is not None:
        return family
    top = max((max(a) for a in enumerate_Y(w, q) if a), default=0)
    return build_family(top)


@dataclass(frozen=True)
class SparseQuadrature:
    """Deduplicated sparse grid with accumulated (possibly negative) weights.

    ``keys`` holds registry-id tuples sorted lexicographically; ``points`` the
    matching coordinates.  Points whose weight cancels to exactly zero are
    dropped.  ``n_contributions`` counts tensor-grid points before merging.
    """

    weights_vector: WeightVector
    level: float
    family: RuleFamily
    keys: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    n_contributions: int
    n_dropped: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.weights_vector)

    @property
    def n_points(self) -> int:
        return len(self.weights)

    @property
    def n_grid_points(self) -> int:
        """Size of the union of tensor grids over Y, zero-weight points included."""
        if "grid" not in self._cache:
            self._cache["grid"] = count_distinct_points(
                self.weights_vector, self.level, family=self.family, over="Y"
            )
        return self._cache["grid"]

    def apply(self, f, batch_size: int = 1 << 14) -> np.ndarray:
        return apply(self, f, batch_size=batch_size)

    def points_in_original_order(self) -> np.ndarray:
        """Coordinates with columns permuted back to the caller's dimension order."""
        out = np.empty_like(self.points)
        out[:, list(self.weights_vector.permutation)] = self.points
        return out


def _aggregate_coefficients(w: WeightVector, q: float, family: RuleFamily) -> dict:
    coeffs: dict[tuple, int] = defaultdict(int)
    for alpha in enumerate_Y(w, q):
        c = _coefficient(alpha, w, q)
        if c:
            _check_family(alpha, family)
            coeffs[tuple(_canonical_level(j) for j in alpha)] += c
    return {k: v for k, v in sorted(coeffs.items()) if v}


def build_combination_quadrature(
    w, q: float, m: int | None = None, family: RuleFamily | None = None
) -> SparseQuadrature:
    """Assemble the anisotropic sparse grid quadrature of level ``q``.

    Integer coefficients of index tuples that select identical tensor rules
    are summed first, so structural cancellations are exact.  Remaining
    contributions to a shared point are combined by compensated summation in
    a fixed order.
    """
    w = _as_weights(w, m)
    q = _check_level(q)
    family = _default_family(w, q, family)
    m = len(w)
    coeffs = _aggregate_coefficients(w, q, family)
    key_blocks, weight_blocks = [], []
    for levels, c in coeffs.items():
        keys, wts = _tensor_grid(levels, family)
        key_blocks.append(keys)
        weight_blocks.append(c * wts)
    keys = np.concatenate(key_blocks) if key_blocks else np.zeros((0, m), np.int64)
    contrib = np.concatenate(weight_blocks) if weight_blocks else np.zeros(0)
    codec = _KeyCodec(family.n_nodes, m)
    ukeys, inverse = codec.unique(keys)
    weights = _grouped_compensated_sum(contrib, inverse, len(ukeys))
    keep = weights != 0.0
    ukeys = ukeys[keep]
    weights = weights[keep]
    points = family.node_values[ukeys] if m else np.zeros((len(ukeys), 0))
    for arr in (ukeys, weights, points):
        arr.setflags(write=False)
    return SparseQuadrature(
        weights_vector=w,
        level=q,
        family=family,
        keys=ukeys,
        points=points,
        weights=weights,
        n_contributions=len(contrib),
        n_dropped=int((~keep).sum()),
    )


def apply(quadrature: SparseQuadrature, f, batch_size: int = 1 << 14) -> np.ndarray:
    """``sum_i weight_i f(point_i)`` accumulated in key order with compensation.

    ``f`` is an :class:`Integrand` or a plain callable accepting a batch of
    points in the caller's original dimension order.  Returns an array of
    shape ``(dim_out,)``.
    """
    if not isinstance(f, Integrand):
        f = Integrand(f, quadrature.dim, 1)
    if f.dim_in != quadrature.dim:
        raise InvalidArgumentError(
            f"integrand expects dimension {f.dim_in}, quadrature has {quadrature.dim}"
        )
    vals = _evaluate(f, quadrature.points_in_original_order(), batch_size)
    return compensated_sum(quadrature.weights[:, None] * vals)


def apply_direct_delta(w, q: float, m: int | None, family: RuleFamily | None, f) -> np.ndarray:
    """Evaluate ``sum_{alpha in X} (Delta_{alpha_1} x ... x Delta_{alpha_m}) f``.

    Each ``Delta_j = Q_j - Q_{j-1}`` is expanded into signed tensor rules and
    accumulated point by point in a dictionary.
    """
    w = _as_weights(w, m)
    q = _check_level(q)
    m = len(w)
    if family is None:
        family = build_family(max((max(a) for a in enumerate_X(w, q) if a), default=0))
    if not isinstance(f, Integrand):
        f = Integrand(f, m, 1)
    acc: dict[tuple, float] = defaultdict(float)
    for alpha in enumerate_X(w, q):
        _check_family(alpha, family)
        nonzero = [n for n in range(m) if alpha[n] > 0]
        for drop in product((0, 1), repeat=len(nonzero)):
            levels = list(alpha)
            for n, d in zip(nonzero, drop):
                levels[n] -= d
            sign = -1.0 if sum(drop) % 2 else 1.0
            rules = [family.rules[j] for j in levels]
            ids = [family.node_ids[j] for j in levels]
            for idx in product(*(range(r.count) for r in rules)):
                key = tuple(int(ids[n][i]) for n, i in enumerate(idx))
                wt = sign
                for n, i in enumerate(idx):
                    wt *= float(rules[n].weights[i])
                acc[key] += wt
    keys = list(acc)
    pts = np.array([[family.node_values[k] for k in key] for key in keys]).reshape(len(keys), m)
    pts[:, list(w.permutation)] = pts.copy()
    vals = _evaluate(f, pts)
    wts = np.array([acc[k] for k in keys])
    return np.array([math.fsum((wts * vals[:, d]).tolist()) for d in range(f.dim_out)])


def count_distinct_points(
    w, q: float, m: int | None = None, family: RuleFamily | None = None, over: str = "Y"
) -> int:
    """Cardinality of the union of tensor grids ``theta_{alpha_1} x ... x theta_{alpha_m}``
    over ``alpha`` in X or Y."""
    w = _as_weights(w, m)
    q = _check_level(q)
    if over not in ("X", "Y"):
        raise InvalidArgumentError(f"over must be 'X' or 'Y', got {over!r}")
    members = enumerate_X(w, q) if over == "X" else enumerate_Y(w, q)
    if family is None:
        family = build_family(max((max(a) for a in members if a), default=0))
    grids = set()
    for alpha in members:
        _check_family(alpha, family)
        grids.add(tuple(_canonical_level(j) for j in alpha))
    if not grids:
        return 0
    blocks = [_tensor_grid(levels, family)[0] for levels in sorted(grids)]
    keys, _ = _KeyCodec(family.n_nodes, len(w)).unique(np.concatenate(blocks))
    return len(keys)


def exactness_certificate(
    w, q: float, m: int | None, family: RuleFamily | None, alpha: Sequence[int], p: Sequence[int]
) -> float:
    """Absolute error of the sparse quadrature on the monomial ``y^p``.

    ``alpha`` and ``p`` are given in the caller's dimension order.  Requires
    ``alpha`` in X and ``p_n <= 2 N_{alpha_n} - 1``; under these
    conditions the quadrature is exact, so the result is pure rounding.
    """
    w = _as_weights(w, m)
    q = _check_level(q)
    alpha = tuple(int(a) for a in alpha)
    p = tuple(int(k) for k in p)
    if len(alpha) != len(w) or len(p) != len(w):
        raise InvalidArgumentError("alpha and p must match the dimension")
    powers = np.asarray(p, dtype=float)
    # caller's order -> ascending-weight order
    alpha = tuple(alpha[k] for k in w.permutation)
    p = tuple(p[k] for k in w.permutation)
    if not in_X(alpha, w, q):
        raise InvalidArgumentError(f"{alpha} is not in X_w({q}, {len(w)})")
    if any(k < 0 or k > 2 * level_to_count(a) - 1 for a, k in zip(alpha, p)):
        raise InvalidArgumentError(f"degree {p} exceeds the exactness box of {alpha}")
    quad = build_combination_quadrature(w, q, family=family)
    exact = math.prod(0.0 if k % 2 else 1.0 / (k + 1) for k in p)
    value = apply(quad, lambda y: np.prod(y ** powers, axis=1))[0]
    return abs(value - exact)


def dump_grid(quadrature: SparseQuadrature, path, original_order: bool = True) -> None:
    """Write points and weights as CSV: one coordinate column per dimension, then the weight."""
    pts = quadrature.points_in_original_order() if original_order else quadrature.points
    m = quadrature.dim
    with open(path, "w") as fh:
        fh.write(",".join([f"y{n + 1}" for n in range(m)] + ["weight"]) + "\n")
        for row, wt in zip(pts, quadrature.weights):
            fh.write(",".join(f"{x:.17g}" for x in (*row, wt)) + "\n")
