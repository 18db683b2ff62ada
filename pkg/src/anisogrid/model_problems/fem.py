"""Piecewise linear finite elements for ``-(a u')' = 1`` on ``(0, 1)``, ``u(0) = u(1) = 0``."""

from __future__ import annotations

import math

import numpy as np

from .._errors import EllipticityError, InvalidArgumentError


def solve_diffusion_1d(a: np.ndarray) -> np.ndarray:
    """Interior nodal values of the P1 solution for elementwise coefficients.

    Parameters
    ----------
    a
        Coefficient on each of the ``M`` uniform elements, shape ``(M,)`` or
        ``(batch, M)``.

    Returns
    -------
    ndarray
        Shape ``(M - 1,)`` or ``(batch, M - 1)``.
    """
    a = np.asarray(a, dtype=float)
    single = a.ndim == 1
    a = np.atleast_2d(a)
    batch, n_el = a.shape
    if n_el < 2:
        raise InvalidArgumentError("need at least two elements")
    if not np.all(a > 0):
        bad = int(np.flatnonzero(~np.all(a > 0, axis=1))[0])
        raise EllipticityError(f"coefficient not positive (min {np.min(a[bad]):.3e})")
    h = 1.0 / n_el
    n = n_el - 1
    rhs = h * h
    # scaled stiffness: diag a_{i-1} + a_i, off-diagonal -a_i
    diag = a[:, :-1] + a[:, 1:]
    off = -a[:, 1:-1]
    cp = np.empty((batch, n))
    dp = np.empty((batch, n))
    cp[:, 0] = off[:, 0] / diag[:, 0] if n > 1 else 0.0
    dp[:, 0] = rhs / diag[:, 0]
    for i in range(1, n):
        denom = diag[:, i] - off[:, i - 1] * cp[:, i - 1]
        if i < n - 1:
            cp[:, i] = off[:, i] / denom
        dp[:, i] = (rhs - off[:, i - 1] * dp[:, i - 1]) / denom
    u = np.empty((batch, n))
    u[:, -1] = dp[:, -1]
    for i in range(n - 2, -1, -1):
        u[:, i] = dp[:, i] - cp[:, i] * u[:, i + 1]
    return u[0] if single else u


def piecewise_constant_solution(a: np.ndarray) -> np.ndarray:
    """Exact interior nodal values for a coefficient constant on each element.

    Uses ``a u' = c - x`` with ``c`` fixed by ``u(1) = 0``; P1 elements are
    nodally exact for this case.
    """
    a = np.asarray(a, dtype=float)
    n_el = len(a)
    x = np.linspace(0.0, 1.0, n_el + 1)
    h = 1.0 / n_el
    inv = 1.0 / a
    sq = 0.5 * (x[1:] ** 2 - x[:-1] ** 2)
    c = np.sum(sq * inv) / (h * np.sum(inv))
    u = np.concatenate([[0.0], np.cumsum((c * h - sq) * inv)])
    return u[1:-1]


def h1_seminorm(u: np.ndarray) -> np.ndarray:
    """Discrete ``H^1_0`` seminorm of interior nodal values along the last axis."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1] + 1
    pad = [(0, 0)] * (u.ndim - 1) + [(1, 1)]
    du = np.diff(np.pad(u, pad), axis=-1)
    return np.sqrt(np.sum(du * du, axis=-1) * n)


def h1_relative_error(u: np.ndarray, u_ref: np.ndarray, h: float | None = None) -> np.ndarray:
    """``|u - u_ref|_{H^1} / |u_ref|_{H^1}`` along the last axis.

    The mesh size cancels in the ratio; ``h`` is only checked for consistency.
    """
    u = np.asarray(u, dtype=float)
    u_ref = np.asarray(u_ref, dtype=float)
    if u.shape != u_ref.shape:
        raise InvalidArgumentError(f"shape mismatch {u.shape} vs {u_ref.shape}")
    if h is not None and not math.isclose(h * (u.shape[-1] + 1), 1.0):
        raise InvalidArgumentError(f"mesh size {h} does not match {u.shape[-1]} interior nodes")
    ref = h1_seminorm(u_ref)
    if np.any(ref == 0):
        raise InvalidArgumentError("reference has zero H1 seminorm")
    return h1_seminorm(u - u_ref) / ref
