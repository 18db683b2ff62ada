"""Leveled Gauss-Legendre rules on [-1, 1] for the measure dy/2.

Level ``j`` uses ``ceil((j + 2) / 2)`` points, so consecutive odd/even
levels share a rule.  Rules are symmetrized after Newton refinement, which
makes the shared midpoint of odd-count rules bit-identical across levels and
lets node coincidence be decided by exact comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._errors import InvalidArgumentError


@dataclass(frozen=True)
class UnivariateRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.nodes)

    def __call__(self, f) -> float:
        return math.fsum(self.weights * f(self.nodes))


def _legendre_and_derivative(n: int, x: np.ndarray):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    # P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def _cached_rule(n: int) -> UnivariateRule:
    half = n // 2
    k = np.arange(1, half + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx), initial=0.0) < 1e-16:
            break
    # one polishing step after convergence
    p, dp = _legendre_and_derivative(n, x)
    x = x - p / dp
    _, dp = _legendre_and_derivative(n, x)
    w_pos = 1.0 / ((1.0 - x * x) * dp * dp)

    pos = x[::-1]
    wp = w_pos[::-1]
    if n % 2:
        # weight of the midpoint: 1 / P'_n(0)^2 for the normalized measure
        _, dp0 = _legendre_and_derivative(n, np.zeros(1))
        w0 = 1.0 / (dp0[0] * dp0[0])
        nodes = np.concatenate([-pos[::-1], [0.0], pos])
        weights = np.concatenate([wp[::-1], [w0], wp])
    else:
        nodes = np.concatenate([-pos[::-1], pos])
        weights = np.concatenate([wp[::-1], wp])
    weights = weights / math.fsum(weights)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return UnivariateRule(nodes, weights)


def gauss_legendre_rule(n: int) -> UnivariateRule:
    """Return the ``n``-point Gauss-Legendre rule normalized to total weight 1.

    Nodes are the roots of the degree-``n`` Legendre polynomial, computed by
    Newton iteration from the asymptotic initial guess.  Symmetric pairs are
    exact negations and the middle node of an odd rule is exactly ``0.0``.
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"point count must be a positive integer, got {n!r}")
    return _cached_rule(int(n))


def level_to_count(j: int) -> int:
    if j < 0:
        raise InvalidArgumentError(f"level must be nonnegative, got {j}")
    return (j + 2 + 1) // 2


def new_point_count(j: int) -> int:
    """Number of nodes of the level-``j`` rule absent from every lower level."""
    if j < 0:
        raise InvalidArgumentError(f"level must be nonnegative, got {j}")
    seen = set()
    for i in range(j):
        seen.update(gauss_legendre_rule(level_to_count(i)).nodes.tolist())
    return sum(1 for x in gauss_legendre_rule(level_to_count(j)).nodes.tolist() if x not in seen)


@dataclass(frozen=True, eq=False)
class RuleFamily:
    """Gauss-Legendre rules for levels ``0..max_level``.

    Attributes
    ----------
    rules
        ``rules[j]`` is the level-``j`` rule; levels with equal point count share
        one object.
    new_point_counts
        ``new_point_counts[j]`` is the number of nodes first appearing at level ``j``.
    node_ids
        ``node_ids[j][i]`` is the registry id of node ``i`` of level ``j``.
    node_values
        Node value for every registry id, in order of first appearance.
    node_origin
        ``(first level, position)`` for every registry id.
    """

    max_level: int
    rules: tuple
    new_point_counts: tuple
    node_ids: tuple
    node_values: np.ndarray
    node_origin: tuple
    _by_value: dict = field(repr=False, compare=False)

    def rule(self, j: int) -> UnivariateRule:
        return self.rules[j]

    def counts(self) -> list[int]:
        return [r.count for r in self.rules]

    @property
    def n_nodes(self) -> int:
        return len(self.node_values)

    def node_id(self, value: float) -> int:
        return self._by_value[float(value)]

    @property
    def midpoint_id(self) -> int:
        return self._by_value[0.0]


def build_family(max_level: int) -> RuleFamily:
    if max_level < 0:
        raise InvalidArgumentError(f"max_level must be nonnegative, got {max_level}")
    by_value: dict[float, int] = {}
    values: list[float] = []
    origin: list[tuple[int, int]] = []
    rules, zetas, ids = [], [], []
    for j in range(max_level + 1):
        rule = gauss_legendre_rule(level_to_count(j))
        fresh = 0
        level_ids = []
        for i, x in enumerate(rule.nodes.tolist()):
            # -0.0 and 0.0 hash alike, so the midpoint gets a single id
            if x not in by_value:
                by_value[x] = len(values)
                values.append(x)
                origin.append((j, i))
                fresh += 1
            level_ids.append(by_value[x])
        rules.append(rule)
        zetas.append(fresh)
        arr = np.asarray(level_ids, dtype=np.int64)
        arr.setflags(write=False)
        ids.append(arr)
    node_values = np.asarray(values)
    node_values.setflags(write=False)
    return RuleFamily(
        max_level=max_level,
        rules=tuple(rules),
        new_point_counts=tuple(zetas),
        node_ids=tuple(ids),
        node_values=node_values,
        node_origin=tuple(origin),
        _by_value=by_value,
    )
