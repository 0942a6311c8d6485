"""Vector norms, matrix norms, and a spectral-radius estimator.

The power-iteration routine is the package's independent check on
eigenvalue claims elsewhere: it touches the operator only through a
callback, so it works for implicit operators as well as dense arrays.
"""

from __future__ import annotations

import warnings
from typing import Callable

import numpy as np

from .matrix import as_matrix, as_vector

__all__ = [
    "vec_p_norm",
    "frobenius_norm",
    "inf_norm",
    "max_norm",
    "spectral_radius_symmetric",
    "operator_2_norm_symmetric",
]


def vec_p_norm(x, p: float = 2.0) -> float:
    """l_p norm of a vector; p=inf gives the max-abs norm."""
    x = as_vector(x)
    if p == np.inf:
        return float(np.max(np.abs(x))) if x.size else 0.0
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float(np.linalg.norm(x, ord=p))


def frobenius_norm(a) -> float:
    """Entrywise 2-norm of a matrix."""
    return float(np.linalg.norm(as_matrix(a), ord="fro"))


def inf_norm(a) -> float:
    """Max absolute row sum."""
    return float(np.linalg.norm(as_matrix(a), ord=np.inf))


def max_norm(a) -> float:
    """Largest absolute entry."""
    a = as_matrix(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def spectral_radius_symmetric(
    apply_op: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    dim: int | None = None,
    *,
    seed: int = 0,
    tol: float = 1e-12,
    max_iters: int = 10_000,
) -> float:
    """Largest-magnitude eigenvalue of a symmetric operator by power iteration.

    Accepts either a dense symmetric matrix or a matvec callback plus its
    dimension. Stops when successive Rayleigh quotients agree to within
    tol relative; warns if the iteration budget runs out first.
    """
    if callable(apply_op):
        if dim is None:
            raise ValueError("dim is required when apply_op is a callback")
        op = apply_op
    else:
        mat = as_matrix(apply_op)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got {mat.shape}")
        if dim is not None and dim != mat.shape[0]:
            raise ValueError(f"dim={dim} disagrees with matrix shape {mat.shape}")
        skew = float(np.max(np.abs(mat - mat.T))) if mat.size else 0.0
        if skew > 1e-12 * max(1.0, float(np.max(np.abs(mat)))):
            raise ValueError(f"matrix is not symmetric (max |A - A^T| entry = {skew:.3e})")
        dim = mat.shape[0]
        op = lambda x: mat @ x

    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    rayleigh = 0.0
    for _ in range(max_iters):
        y = op(x)
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            return 0.0  # x in the kernel and operator symmetric: radius 0 seen
        next_rayleigh = float(x @ y)
        x = y / norm_y
        if abs(next_rayleigh - rayleigh) <= tol * max(1.0, abs(next_rayleigh)):
            return abs(next_rayleigh)
        rayleigh = next_rayleigh
    warnings.warn(
        f"power iteration hit max_iters={max_iters} before tol={tol}",
        RuntimeWarning,
        stacklevel=2,
    )
    return abs(rayleigh)


def operator_2_norm_symmetric(apply_op, dim: int | None = None, **kw) -> float:
    """2-norm of a symmetric operator (equals its spectral radius)."""
    return spectral_radius_symmetric(apply_op, dim, **kw)
