"""Quadrature weights from per-dimension analyticity radii."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import zeta

from .._errors import InvalidArgumentError
from ..indexset import WeightVector


@dataclass(frozen=True)
class AnalyticityProfile:
    """Radii ``tau_n``, Bernstein parameters ``kappa_n = tau_n + sqrt(1 + tau_n^2)``
    and weights ``w_n = log(kappa_n)``, all in the caller's dimension order.

    ``weight_vector`` holds the same weights sorted ascending together with the
    permutation back to the original order.
    """

    taus: np.ndarray
    kappas: np.ndarray
    quad_weights: np.ndarray

    @classmethod
    def from_taus(cls, taus: Sequence[float]) -> "AnalyticityProfile":
        taus = np.asarray(taus, dtype=float)
        if np.any(~(taus > 0)) or not np.all(np.isfinite(taus)):
            raise InvalidArgumentError("analyticity radii must be positive and finite")
        # hypot avoids overflow for the very large radii of fast-decaying modes
        kappas = taus + np.hypot(1.0, taus)
        # log1p keeps small radii accurate: kappa - 1 = tau + (sqrt(1 + tau^2) - 1)
        weights = np.log1p(taus + taus * taus / (1.0 + np.hypot(1.0, taus)))
        return cls(taus, kappas, weights)

    @property
    def weight_vector(self) -> WeightVector:
        return WeightVector(self.quad_weights)

    @property
    def dim(self) -> int:
        return len(self.taus)


def profile_from_gammas(gammas: Sequence[float]) -> AnalyticityProfile:
    """Tensor-product choice ``tau_n = 1 / gamma_n``."""
    gammas = np.asarray(gammas, dtype=float)
    if np.any(~(gammas > 0)):
        raise InvalidArgumentError("gammas must be positive")
    return AnalyticityProfile.from_taus(1.0 / gammas)


def zeta_constant(delta: float) -> float:
    """``sum_{k >= 1} k^(-1-delta)``."""
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    return float(zeta(1.0 + delta, 1.0))


def profile_theoretical(gammas: Sequence[float], a_lower: float, delta: float) -> AnalyticityProfile:
    """Radii ``a_lower / (C(delta) k^(1+delta) gamma_k)`` guaranteeing analyticity
    on the whole tensor-product region."""
    if not a_lower > 0:
        raise InvalidArgumentError(f"ellipticity constant must be positive, got {a_lower}")
    c = zeta_constant(delta)
    gammas = np.asarray(gammas, dtype=float)
    if np.any(~(gammas > 0)):
        raise InvalidArgumentError("gammas must be positive")
    k = np.arange(1, len(gammas) + 1, dtype=float)
    return AnalyticityProfile.from_taus(a_lower / (c * k ** (1.0 + delta) * gammas))


def algebraic_profile(r: float, m: int) -> AnalyticityProfile:
    """Profile for ``gamma_n = n^(-r)``, i.e. ``tau_n = n^r``."""
    n = np.arange(1, m + 1, dtype=float)
    return AnalyticityProfile.from_taus(n ** r)
