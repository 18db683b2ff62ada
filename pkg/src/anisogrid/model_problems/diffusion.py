"""Stochastic diffusion problem driven by a truncated KL expansion.

``a(x, y) = E[a] + sqrt(3) sum_n sqrt(lambda_n) phi_n(x) y_n`` with
``y`` uniform on ``[-1, 1]^m``; the random variables have unit variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._errors import EllipticityError, InvalidArgumentError
from ..sparse_quad import Integrand
from .analyticity import AnalyticityProfile, profile_from_gammas, profile_theoretical
from .fem import solve_diffusion_1d
from .kl import KLExpansion, MaternKernel, kl_expansion

ELLIPTICITY_FLOOR = 0.05


@dataclass(frozen=True)
class DiffusionConfig:
    nu: float = 2.5
    ell: float = 0.5
    variance: float = 0.25
    mean: float = 2.5
    h_exponent: int = 9
    trace_tol: float = 1e-8
    max_rank: int | None = None

    @property
    def n_elements(self) -> int:
        return 1 << self.h_exponent


@dataclass(frozen=True)
class DiffusionModel:
    """Discretized model.

    ``midpoint_modes[n, k]`` is ``sqrt(3 lambda_n) phi_n`` at the midpoint of
    element ``k``, so the element coefficients for parameters ``y`` are
    ``mean + y @ midpoint_modes``.
    """

    config: DiffusionConfig
    kl: KLExpansion
    midpoint_modes: np.ndarray
    a_lower: float = field(default=0.0)

    @property
    def dim(self) -> int:
        return self.kl.rank

    @property
    def n_elements(self) -> int:
        return self.config.n_elements

    @property
    def mean_field(self) -> np.ndarray:
        """``E[a]`` at the grid nodes."""
        return np.full(self.n_elements + 1, self.config.mean)

    def coefficient(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.config.mean + y @ self.midpoint_modes

    def solve(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        a = self.coefficient(y)
        try:
            return solve_diffusion_1d(a)
        except EllipticityError as exc:
            rows = np.atleast_2d(a)
            yy = np.atleast_2d(y)
            bad = int(np.flatnonzero(~np.all(rows > 0, axis=1))[0])
            raise EllipticityError(str(exc), y=yy[bad].tolist()) from None

    def profile(self, mode: str = "tensor", delta: float = 1.0) -> AnalyticityProfile:
        """Analyticity profile: ``"tensor"`` uses ``1 / gamma_n``, ``"theoretical"``
        the summable radii with decay exponent ``1 + delta``."""
        if mode == "tensor":
            return profile_from_gammas(self.kl.gammas)
        if mode == "theoretical":
            return profile_theoretical(self.kl.gammas, self.a_lower, delta)
        raise InvalidArgumentError(f"unknown profile mode {mode!r}")


def worst_case_coefficient(config: DiffusionConfig, midpoint_modes: np.ndarray) -> float:
    """Minimum of the element coefficients over all of ``[-1, 1]^m``.

    The coefficient is affine in ``y``, so the minimum over the cube is
    ``mean - sum_n |B_nk|`` and is attained at a vertex.
    """
    return float(np.min(config.mean - np.sum(np.abs(midpoint_modes), axis=0)))


def build_diffusion_model(config: DiffusionConfig | None = None) -> DiffusionModel:
    config = config or DiffusionConfig()
    if config.h_exponent < 1:
        raise InvalidArgumentError("need at least two elements")
    kernel = MaternKernel(config.nu, config.ell, config.variance)
    kl = kl_expansion(kernel, config.n_elements, config.trace_tol, config.max_rank)
    mids = 0.5 * (kl.modes[:-1] + kl.modes[1:])
    b = (math.sqrt(3.0) * np.sqrt(kl.lambdas))[:, None] * mids.T
    a_min = worst_case_coefficient(config, b)
    if a_min < ELLIPTICITY_FLOOR:
        raise EllipticityError(
            f"coefficient may drop to {a_min:.3e} < {ELLIPTICITY_FLOOR} on the parameter domain"
        )
    return DiffusionModel(config, kl, b, a_min)


def moments_integrand(model: DiffusionModel, p_max: int = 1) -> Integrand:
    """``y -> [u(y), u(y)^2, ..., u(y)^p_max]`` flattened over interior nodes."""
    if not 1 <= p_max <= 4:
        raise InvalidArgumentError(f"moment order must be in 1..4, got {p_max}")
    n = model.n_elements - 1

    def f(y):
        u = model.solve(y)
        return np.concatenate([u ** p for p in range(1, p_max + 1)], axis=1)

    return Integrand(f, model.dim, n * p_max)


def moment_integrand(model: DiffusionModel, p: int = 1) -> Integrand:
    """``y -> u(y)^p`` at the interior nodes."""
    if not 1 <= p <= 4:
        raise InvalidArgumentError(f"moment order must be in 1..4, got {p}")

    def f(y):
        return model.solve(y) ** p

    return Integrand(f, model.dim, model.n_elements - 1)


def split_moments(values: np.ndarray, p_max: int) -> list[np.ndarray]:
    return np.split(np.asarray(values), p_max, axis=-1)
