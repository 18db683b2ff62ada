"""The rational test integrand ``(0.6 + 0.2 sum_n n^(-r) y_n)^(-1)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._errors import InvalidArgumentError
from ..sparse_quad import Integrand


@dataclass(frozen=True)
class AnalyticProblem:
    r: float
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgumentError(f"dimension must be positive, got {self.m}")
        if not self.r >= 2:
            raise InvalidArgumentError(f"decay exponent must be at least 2, got {self.r}")

    @property
    def coefficients(self) -> np.ndarray:
        return 0.2 * np.arange(1, self.m + 1, dtype=float) ** (-self.r)

    @property
    def denominator_lower_bound(self) -> float:
        return 0.6 - float(np.sum(self.coefficients))

    def integrand(self) -> Integrand:
        c = self.coefficients

        def f(y):
            return 1.0 / (0.6 + y @ c)

        return Integrand(f, self.m, 1)


def analytic_integrand(r: float, m: int) -> Integrand:
    return AnalyticProblem(r, m).integrand()
