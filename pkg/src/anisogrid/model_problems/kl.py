"""Karhunen-Loeve expansion of a Matern random field on a uniform 1D grid.

The covariance operator is discretized with a mass-lumped (trapezoid)
quadrature, factorized by a pivoted Cholesky decomposition that only touches
the columns it needs, and diagonalized through the small Gram matrix of the
factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .._errors import InvalidArgumentError, NotPositiveSemidefiniteError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MaternKernel:
    """Matern covariance with smoothness ``nu`` in {5/2, 7/2}, correlation length
    ``ell`` and variance ``variance``."""

    nu: float = 2.5
    ell: float = 0.5
    variance: float = 0.25

    def __post_init__(self):
        if self.nu not in (2.5, 3.5):
            raise InvalidArgumentError(f"smoothness must be 5/2 or 7/2, got {self.nu}")
        if not self.ell > 0:
            raise InvalidArgumentError(f"correlation length must be positive, got {self.ell}")
        if not self.variance > 0:
            raise InvalidArgumentError(f"variance must be positive, got {self.variance}")

    def __call__(self, rho):
        return matern_covariance(rho, self.nu, self.ell, self.variance)


def matern_covariance(rho, nu: float = 2.5, ell: float = 0.5, variance: float = 0.25):
    """Matern covariance at distance ``rho``.

    ``nu = 5/2``: ``(1 + s + s^2/3) exp(-s)`` with ``s = sqrt(5) rho / ell``.
    ``nu = 7/2``: ``(1 + s + 2 s^2/5 + s^3/15) exp(-s)`` with ``s = sqrt(7) rho / ell``.
    """
    rho = np.abs(np.asarray(rho, dtype=float))
    if nu == 2.5:
        s = math.sqrt(5.0) * rho / ell
        poly = 1.0 + s + s * s / 3.0
    elif nu == 3.5:
        s = math.sqrt(7.0) * rho / ell
        poly = 1.0 + s + 2.0 * s * s / 5.0 + s ** 3 / 15.0
    else:
        raise InvalidArgumentError(f"smoothness must be 5/2 or 7/2, got {nu}")
    return variance * poly * np.exp(-s)


@dataclass(frozen=True)
class PivotedCholesky:
    """Low-rank factor ``C ~ L L^T``.

    ``residual_traces[k]`` is the trace of ``C - L_k L_k^T`` after ``k`` steps,
    starting from the full trace.
    """

    factor: np.ndarray
    pivots: np.ndarray
    residual_traces: np.ndarray

    @property
    def rank(self) -> int:
        return self.factor.shape[1]


def pivoted_cholesky(
    accessor: Callable[[np.ndarray, np.ndarray], np.ndarray],
    n: int,
    trace_tol: float,
    diagonal: np.ndarray | None = None,
    max_rank: int | None = None,
) -> PivotedCholesky:
    """Greedy pivoted Cholesky of a symmetric PSD matrix given by entries.

    Parameters
    ----------
    accessor
        ``accessor(rows, cols)`` returns the submatrix with those row and
        column indices.
    n
        Matrix size.
    trace_tol
        Stop once the residual trace is at most ``trace_tol`` times the
        initial trace.
    diagonal
        Diagonal of the matrix; fetched through ``accessor`` when omitted.

    Raises
    ------
    NotPositiveSemidefiniteError
        If a pivot falls below ``-8 eps`` times the initial trace.
    """
    if n < 1:
        raise InvalidArgumentError("matrix size must be positive")
    if not trace_tol >= 0:
        raise InvalidArgumentError(f"trace tolerance must be nonnegative, got {trace_tol}")
    all_idx = np.arange(n)
    if diagonal is None:
        diagonal = np.array([accessor(np.array([i]), np.array([i]))[0, 0] for i in range(n)])
    d = np.array(diagonal, dtype=float)
    if np.any(d < 0):
        raise NotPositiveSemidefiniteError("negative diagonal entry")
    trace0 = math.fsum(d.tolist())
    history = [trace0]
    cols: list[np.ndarray] = []
    pivots: list[int] = []
    limit = n if max_rank is None else min(n, max_rank)
    err = trace0
    while err > trace_tol * trace0 and len(cols) < limit:
        i = int(np.argmax(d))
        piv = d[i]
        if piv < -8.0 * _EPS * trace0:
            raise NotPositiveSemidefiniteError(f"pivot {piv:.3e} at index {i}")
        if piv <= 8.0 * _EPS * trace0:
            break
        col = accessor(all_idx, np.array([i]))[:, 0].astype(float)
        for prev in cols:
            col -= prev * prev[i]
        col /= math.sqrt(piv)
        d -= col * col
        d[i] = 0.0
        if np.min(d) < -8.0 * _EPS * trace0:
            raise NotPositiveSemidefiniteError(f"residual diagonal {np.min(d):.3e} after {len(cols) + 1} steps")
        cols.append(col)
        pivots.append(i)
        err = math.fsum(d.tolist())
        history.append(err)
    factor = np.stack(cols, axis=1) if cols else np.zeros((n, 0))
    return PivotedCholesky(factor, np.asarray(pivots, dtype=np.int64), np.asarray(history))


@dataclass(frozen=True)
class KLExpansion:
    """Discrete KL expansion on the nodes ``x``.

    ``lambdas`` are in descending order, ``modes[:, n]`` is the nodal values of
    the ``n``-th eigenfunction, normalized in the lumped-mass inner product,
    and ``gammas[n] = sqrt(lambdas[n]) * max |modes[:, n]|``.
    """

    x: np.ndarray
    mass: np.ndarray
    lambdas: np.ndarray
    modes: np.ndarray
    gammas: np.ndarray
    cholesky: PivotedCholesky

    @property
    def rank(self) -> int:
        return len(self.lambdas)

    def reconstruct(self) -> np.ndarray:
        """``sum_n lambda_n phi_n(x_i) phi_n(x_j)`` on the grid."""
        return (self.modes * self.lambdas) @ self.modes.T

    @property
    def truncation_error(self) -> float:
        return float(self.cholesky.residual_traces[-1])


def lumped_mass(n_elements: int) -> np.ndarray:
    h = 1.0 / n_elements
    w = np.full(n_elements + 1, h)
    w[0] = w[-1] = h / 2
    return w


def eig_from_factor(factor: np.ndarray, mass: np.ndarray | None = None):
    """Eigenpairs of ``M^(-1/2) L L^T M^(-1/2)`` from the small Gram matrix ``L^T L``.

    Returns ``(lambdas, modes)`` with ``modes`` orthonormal in the ``M``-weighted
    inner product, descending ``lambdas``, and each mode signed so that its first
    entry of significant size is positive.
    """
    gram = factor.T @ factor
    lam, v = np.linalg.eigh(gram)
    order = np.argsort(lam)[::-1]
    lam, v = lam[order], v[:, order]
    keep = lam > 0
    lam, v = lam[keep], v[:, keep]
    psi = factor @ v / np.sqrt(lam)
    modes = psi if mass is None else psi / np.sqrt(mass)[:, None]
    for k in range(modes.shape[1]):
        col = modes[:, k]
        first = np.flatnonzero(np.abs(col) > 1e-3 * np.max(np.abs(col)))[0]
        if col[first] < 0:
            modes[:, k] = -col
    return lam, modes


def kl_expansion(kernel: MaternKernel, n_elements: int, trace_tol: float = 1e-8,
                 max_rank: int | None = None) -> KLExpansion:
    """KL expansion of ``kernel`` on ``[0, 1]`` with ``n_elements`` uniform cells."""
    if n_elements < 1:
        raise InvalidArgumentError("need at least one element")
    x = np.linspace(0.0, 1.0, n_elements + 1)
    mass = lumped_mass(n_elements)
    sw = np.sqrt(mass)

    def accessor(rows, cols):
        return sw[rows, None] * kernel(x[rows, None] - x[None, cols]) * sw[None, cols]

    diag = kernel.variance * mass
    chol = pivoted_cholesky(accessor, len(x), trace_tol, diagonal=diag, max_rank=max_rank)
    lam, modes = eig_from_factor(chol.factor, mass)
    gammas = np.sqrt(lam) * np.max(np.abs(modes), axis=0)
    return KLExpansion(x, mass, lam, modes, gammas, chol)
