"""Weighted sparse index sets, combination coefficients, cardinality bounds and cost.

All operations take the weight vector in ascending order (see
:class:`WeightVector`).  The level ``q`` is a nonnegative real; ties with the
budget are included.  Membership is decided by accumulating ``alpha_n * w_n``
left to right and comparing against ``q`` with a relative slack of eight
machine epsilons, so every routine here agrees on the boundary.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from ._errors import InvalidArgumentError, LevelOverflowError

_EPS = np.finfo(float).eps


def _tol(q: float) -> float:
    return q + 8.0 * _EPS * abs(q)


class WeightVector(tuple):
    """Positive weights sorted ascending, remembering the original order.

    ``permutation[k]`` is the original position of sorted entry ``k``.
    """

    permutation: tuple

    def __new__(cls, entries: Sequence[float]):
        vals = [float(x) for x in entries]
        if any(not (x > 0.0) or not math.isfinite(x) for x in vals):
            raise InvalidArgumentError("weights must be finite and strictly positive")
        order = sorted(range(len(vals)), key=lambda k: (vals[k], k))
        self = super().__new__(cls, (vals[k] for k in order))
        self.permutation = tuple(order)
        return self

    @classmethod
    def uniform(cls, m: int, value: float = 1.0) -> "WeightVector":
        return cls([value] * m)

    def to_original(self, alpha: Sequence[int]) -> tuple:
        """Reorder a multi-index from sorted to original dimension order."""
        out = [0] * len(alpha)
        for k, a in enumerate(alpha):
            out[self.permutation[k]] = a
        return tuple(out)

    @property
    def l1(self) -> float:
        return math.fsum(self)


def _as_weights(w, m=None) -> WeightVector:
    if not isinstance(w, WeightVector):
        if np.isscalar(w):
            if m is None:
                raise InvalidArgumentError("scalar weight needs an explicit dimension")
            w = [float(w)] * m
        w = WeightVector(w)
    if m is not None and len(w) != m:
        raise InvalidArgumentError(f"weight vector has {len(w)} entries but m={m}")
    return w


def _check_level(q: float) -> float:
    q = float(q)
    if not q >= 0.0 or not math.isfinite(q):
        raise InvalidArgumentError(f"level must be a finite nonnegative number, got {q!r}")
    return q


def weighted_level(alpha: Sequence[int], w: Sequence[float]) -> float:
    s = 0.0
    for a, wn in zip(alpha, w):
        if a:
            s = s + a * wn
    return s


def in_X(alpha: Sequence[int], w: Sequence[float], q: float) -> bool:
    return weighted_level(alpha, w) <= _tol(q)


def in_Y(alpha: Sequence[int], w: Sequence[float], q: float) -> bool:
    # alpha + (1,...,1) leaving X is the float-robust form of q - |w|_1 < <alpha, w>
    return in_X(alpha, w, q) and not in_X([a + 1 for a in alpha], w, q)


def _enumerate_X_sparse(w: WeightVector, q: float) -> Iterator[tuple]:
    """Yield members of X as tuples of ``(dim, level)`` for nonzero levels.

    Order is lexicographic in the dense representation.  Dimension ``n`` is
    only visited while ``w_n`` still fits in the remaining budget; ascending
    weights make this prune exhaustive.
    """
    lim = _tol(q)
    m = len(w)

    def rec(n, s, prefix):
        if n == m or s + w[n] > lim:
            yield tuple(prefix)
            return
        wn = w[n]
        # a = 0 first: later dimensions vary before this one grows
        yield from rec(n + 1, s, prefix)
        a = 1
        while s + a * wn <= lim:
            prefix.append((n, a))
            yield from rec(n + 1, s + a * wn, prefix)
            prefix.pop()
            a += 1

    yield from rec(0, 0.0, [])


def _dense(sparse: tuple, m: int) -> tuple:
    out = [0] * m
    for n, a in sparse:
        out[n] = a
    return tuple(out)


def enumerate_X(w, q: float, m: int | None = None) -> list[tuple]:
    """Members of ``{alpha >= 0 : sum_n alpha_n w_n <= q}`` in lexicographic order."""
    q = _check_level(q)
    w = _as_weights(w, m)
    m = len(w)
    return [_dense(s, m) for s in _enumerate_X_sparse(w, q)]


def enumerate_Y(w, q: float, m: int | None = None) -> list[tuple]:
    """Members of X with weighted level above ``q - |w|_1``."""
    q = _check_level(q)
    w = _as_weights(w, m)
    return [a for a in enumerate_X(w, q) if not in_X([x + 1 for x in a], w, q)]


def _active_dims(alpha, w, q) -> list[int]:
    # superset of {n : alpha + e_n in X}; exact membership is rechecked per subset
    s = weighted_level(alpha, w)
    lim = _tol(q) * (1.0 + 1e-12)
    out = []
    for n, wn in enumerate(w):
        if s + wn > lim:
            break
        out.append(n)
    return out


def _coefficient(alpha, w, q) -> int:
    lim = _tol(q)
    active = set(_active_dims(alpha, w, q))
    dims = [n for n in range(len(w)) if alpha[n] or n in active]

    # walk the relevant dimensions in index order so partial sums match
    # weighted_level bit for bit; partial sums only grow, so prune early
    def rec(i, s, sign):
        if i == len(dims):
            return sign
        n = dims[i]
        a = alpha[n]
        total = 0
        s0 = s + a * w[n] if a else s
        if s0 <= lim:
            total += rec(i + 1, s0, sign)
        if n in active:
            s1 = s + (a + 1) * w[n]
            if s1 <= lim:
                total += rec(i + 1, s1, -sign)
        return total

    return rec(0, 0.0, 1)


def combination_coefficient(alpha: Sequence[int], w, q: float, m: int | None = None) -> int:
    """Combination-technique coefficient ``sum_{beta in {0,1}^m, alpha+beta in X} (-1)^|beta|``.

    Only defined for ``alpha`` in Y; raises :class:`InvalidArgumentError` otherwise.
    """
    q = _check_level(q)
    w = _as_weights(w, m)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != len(w):
        raise InvalidArgumentError(f"index {alpha} does not match dimension {len(w)}")
    if min(alpha, default=0) < 0 or not in_Y(alpha, w, q):
        raise InvalidArgumentError(f"index {alpha} is not in Y_w({q}, {len(w)})")
    return _coefficient(alpha, w, q)


def combination_coefficients(w, q: float, m: int | None = None) -> dict[tuple, int]:
    """Map every ``alpha`` in Y to its combination coefficient (zeros included)."""
    w = _as_weights(w, m)
    return {a: _coefficient(a, w, q) for a in enumerate_Y(w, q)}


@dataclass(frozen=True)
class WeightedIndexSet:
    weights: WeightVector
    level: float
    members_X: tuple
    members_Y: tuple
    coefficients: dict

    @property
    def dim(self) -> int:
        return len(self.weights)

    @classmethod
    def build(cls, w, q: float, m: int | None = None) -> "WeightedIndexSet":
        w = _as_weights(w, m)
        q = _check_level(q)
        X = enumerate_X(w, q)
        Y = tuple(a for a in X if not in_X([x + 1 for x in a], w, q))
        coeffs = {a: _coefficient(a, w, q) for a in Y}
        return cls(w, q, tuple(X), Y, coeffs)


# ---------------------------------------------------------------------------
# counting and bounds


def _count_last(w_last: float, budget: float) -> int:
    if budget < 0.0:
        return 0
    j = math.floor(budget / w_last)
    while (j + 1) * w_last <= budget:
        j += 1
    while j > 0 and j * w_last > budget:
        j -= 1
    return j + 1


def cardinality_X(w, q: float, m: int | None = None) -> int:
    """Exact ``#X_w(q, m)`` by recursion over the last (largest-weight) dimension."""
    q = _check_level(q)
    w = _as_weights(w, m)
    slack = _tol(q) - q

    @lru_cache(maxsize=None)
    def card(k: int, budget: float) -> int:
        # dimensions whose weight exceeds the budget can only sit at level 0
        k = min(k, bisect.bisect_right(w, budget + slack))
        if k == 0:
            return 1
        if k == 1:
            return _count_last(w[0], budget + slack)
        wk = w[k - 1]
        total = 0
        j = 0
        while j * wk <= budget + slack:
            total += card(k - 1, budget - j * wk)
            j += 1
        return total

    if len(w) == 0:
        return 1
    return card(len(w), q)


def bound_sg(w, q: float, m: int | None = None) -> float:
    """Novel product bound ``prod_n (q / (n w_n) + 1)``; needs ascending weights."""
    w = _as_weights(w, m)
    q = _check_level(q)
    return math.prod(q / (n * wn) + 1.0 for n, wn in enumerate(w, start=1))


def bound_bd(w, q: float, m: int | None = None) -> float:
    """Beged-Dov bound ``prod_n (q + |w|_1) / (n w_n)``."""
    w = _as_weights(w, m)
    q = _check_level(q)
    top = q + w.l1
    return math.prod(top / (n * wn) for n, wn in enumerate(w, start=1))


def bound_tp(w, q: float, m: int | None = None) -> int:
    """Anisotropic tensor-product count ``prod_n (floor(q / w_n) + 1)``."""
    w = _as_weights(w, m)
    q = _check_level(q)
    lim = _tol(q)
    return math.prod(_count_last(wn, lim) for wn in w)


def bound_loglog(q: float, m: int, r: float) -> float:
    """``log(m)^(q/r)``, the dimension-growth estimate with unit constant."""
    if m < 3:
        raise InvalidArgumentError(f"log-log estimate needs m >= 3, got {m}")
    if not r > 1:
        raise InvalidArgumentError(f"decay exponent must exceed 1, got {r}")
    q = _check_level(q)
    return math.log(m) ** (q / r)


def bound_floor_variant(w, q: float, m: int | None = None) -> float:
    """``prod_n (floor(q/w_n) + n) / n``; holds often but not always."""
    w = _as_weights(w, m)
    lim = _tol(_check_level(q))
    return math.prod((_count_last(wn, lim) - 1 + n) / n for n, wn in enumerate(w, start=1))


def cost_exact(w, q: float, m: int | None = None, family=None) -> int:
    """Function evaluations of the sparse quadrature: ``sum_{alpha in X} prod_n zeta_{alpha_n}``.

    Terms with an even positive level vanish, which the enumeration exploits.
    """
    w = _as_weights(w, m)
    q = _check_level(q)
    if family is None:
        from .gauss1d import build_family

        family = build_family(max_level(w, q))
    zeta = family.new_point_counts
    total = 0
    for sp in _enumerate_X_sparse(w, q):
        prod = 1
        for _, a in sp:
            if a > family.max_level:
                raise LevelOverflowError(_dense(sp, len(w)), family.max_level)
            prod *= zeta[a]
            if prod == 0:
                break
        total += prod
    return total


def cost_bound_sq(w, q: float, m: int | None = None) -> int:
    return cardinality_X(w, q, m) ** 2


def max_box_volume(w, q: float, m: int | None = None) -> int:
    """Largest ``prod_n (alpha_n + 1)`` over X; never exceeds ``#X``."""
    w = _as_weights(w, m)
    q = _check_level(q)
    return max(math.prod(a + 1 for _, a in sp) for sp in _enumerate_X_sparse(w, q))


def max_level(w, q: float, m: int | None = None) -> int:
    """Largest univariate level used by any member of X."""
    w = _as_weights(w, m)
    q = _check_level(q)
    return _count_last(w[0], _tol(q)) - 1 if len(w) else 0


def go_constant(w, beta: float, m: int | None = None) -> float:
    """``sum_n 1 / (exp(w_n / beta) - 1)``."""
    if not beta > 1:
        raise InvalidArgumentError(f"beta must exceed 1, got {beta}")
    w = list(w) if m is None else list(w)[:m]
    return math.fsum(1.0 / math.expm1(wn / beta) for wn in w)


def check_go_tail(w, q: float, m: int | None, beta: float, box: Sequence[int]) -> tuple[float, float]:
    """Compare the truncated tail ``sum_{alpha <= box, alpha not in X} exp(-<w, alpha>)``
    with ``exp(beta * M) / beta * #X^(1 - beta)``.

    Returns ``(tail_sum, bound)``.
    """
    if not beta > 1:
        raise InvalidArgumentError(f"beta must exceed 1, got {beta}")
    w = _as_weights(w, m)
    q = _check_level(q)
    box = tuple(int(b) for b in box)
    if len(box) != len(w) or min(box, default=0) < 0:
        raise InvalidArgumentError(f"box {box} does not match dimension {len(w)}")
    box = tuple(box[k] for k in w.permutation)
    # sum over the whole box factorizes into geometric partial sums
    full = math.prod(
        -math.expm1(-wn * (b + 1)) / -math.expm1(-wn) for wn, b in zip(w, box)
    )
    inside = []
    for sp in _enumerate_X_sparse(w, q):
        if all(a <= box[n] for n, a in sp):
            inside.append(math.exp(-math.fsum(a * w[n] for n, a in sp)))
    tail = max(full - math.fsum(inside), 0.0)
    bound = math.exp(beta * go_constant(w, beta)) / beta * cardinality_X(w, q) ** (-(beta - 1.0))
    return tail, bound
