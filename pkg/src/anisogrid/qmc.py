"""Plain Halton quasi-Monte Carlo on [-1, 1]^m, used for reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError
from .sparse_quad import Integrand, _evaluate, compensated_sum


def first_primes(m: int) -> list[int]:
    if m <= 0:
        return []
    # upper bound for the m-th prime, valid for m >= 6
    limit = 15 if m < 6 else int(m * (math.log(m) + math.log(math.log(m)))) + 1
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(limit ** 0.5) + 1):
        if sieve[k]:
            sieve[k * k::k] = False
    return np.flatnonzero(sieve)[:m].tolist()


def radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    """Base-``base`` radical inverse of nonnegative integers.

    The digit reversal is carried out in integer arithmetic and divided by
    ``base**K`` once, so results are exactly rounded.
    """
    idx = np.asarray(indices, dtype=np.int64)
    top = int(idx.max(initial=0))
    n_digits = 1
    while base ** n_digits <= top:
        n_digits += 1
    if n_digits * math.log2(base) > 62:
        raise InvalidArgumentError("index too large for exact radical inverse")
    num = np.zeros_like(idx)
    rest = idx.copy()
    for _ in range(n_digits):
        num = num * base + rest % base
        rest //= base
    return num / float(base ** n_digits)


def halton_points(start: int, count: int, dim: int) -> np.ndarray:
    """Halton points with indices ``start .. start + count - 1`` in ``[0, 1)^dim``."""
    if start < 1:
        raise InvalidArgumentError("Halton indices start at 1")
    idx = np.arange(start, start + count, dtype=np.int64)
    return np.stack([radical_inverse(idx, b) for b in first_primes(dim)], axis=1)


def halton_point(index: int, dim: int) -> np.ndarray:
    return halton_points(index, 1, dim)[0]


@dataclass
class HaltonStream:
    """Sequential Halton generator; the origin (index 0) is never produced."""

    dim: int
    next_index: int = 1

    @property
    def bases(self) -> list[int]:
        return first_primes(self.dim)

    def take(self, count: int) -> np.ndarray:
        pts = halton_points(self.next_index, count, self.dim)
        self.next_index += count
        return pts


def qmc_estimates(f: Integrand, sizes, batch_size: int = 1 << 15) -> list[np.ndarray]:
    """Estimates over the first ``N`` Halton points for each ``N`` in ``sizes``.

    All estimates share one pass over the sequence, so the smaller ones are
    prefixes of the largest.
    """
    sizes = sorted(int(n) for n in sizes)
    if not sizes or sizes[0] < 1:
        raise InvalidArgumentError("need at least one sample")
    stream = HaltonStream(f.dim_in)
    partial = []
    out = {}
    done = 0
    for n in sizes:
        while done < n:
            k = min(batch_size, n - done)
            y = 2.0 * stream.take(k) - 1.0
            partial.append(np.atleast_1d(compensated_sum(_evaluate(f, y, batch_size))))
            done += k
        out[n] = np.atleast_1d(compensated_sum(np.array(partial))) / n
    return [out[n] for n in sizes]


def qmc_integrate(f: Integrand, n_samples: int, batch_size: int = 1 << 15) -> np.ndarray:
    """``(1/N) sum_{i=1..N} f(2 u_i - 1)`` over the first ``N`` Halton points."""
    return qmc_estimates(f, [n_samples], batch_size)[0]
