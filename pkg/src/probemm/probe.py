"""Probe vectors and the implicit regularized Gram operator.

Multiplying two n x n matrices is recast as recovering the product's
entries from how it acts on a single probe vector v. Stacking shifted
copies of v into the wide matrix V (one block per product row) turns the
recovery into least squares, and the regularized normal-equations
operator G = V^T V + ridge*I is block diagonal with identical n x n
blocks v v^T + ridge*I. Nothing here ever materializes V or G: the
operator is applied in O(n^2) through the closed block form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .matrix import DimensionMismatchError, as_matrix, as_vector, matvec

__all__ = [
    "ProbeVector",
    "ProbeSystem",
    "ImplicitGram",
    "build_probe",
    "random_probe",
    "default_entry",
    "compute_rhs",
    "build_system",
]


def default_entry(n: int) -> float:
    """Default probe entry and ridge for size n: 1/n**3."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 1.0 / float(n) ** 3


@dataclass(frozen=True)
class ProbeVector:
    """A probe vector with its ridge, plus the cached squared norm.

    The squared norm is the Gram blocks' dominant eigenvalue shift: each
    block v v^T + ridge*I has eigenvalues {sq_norm + ridge, ridge}.
    """

    n: int
    entries: np.ndarray
    ridge: float
    sq_norm: float = field(init=False)

    def __post_init__(self):
        entries = as_vector(self.entries)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if entries.shape[0] != self.n:
            raise DimensionMismatchError(
                f"probe has {entries.shape[0]} entries, expected n={self.n}"
            )
        if not (self.ridge > 0.0):
            raise ValueError(f"ridge must be > 0, got {self.ridge}")
        if np.all(entries == 0.0):
            raise ValueError("probe vector must be nonzero")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "sq_norm", float(entries @ entries))

    @property
    def condition_bound(self) -> float:
        """Upper bound on the Gram operator's condition number: 1 + |v|^2/ridge."""
        return 1.0 + self.sq_norm / self.ridge


def build_probe(n: int, entries=None, ridge: float | None = None) -> ProbeVector:
    """Probe of size n; entries and ridge default to the 1/n^3 schedule.

    A scalar `entries` fills the whole vector with that constant.
    """
    default = default_entry(n)
    if entries is None:
        vec = np.full(n, default)
    elif np.isscalar(entries):
        vec = np.full(n, float(entries))
    else:
        vec = as_vector(entries)
    if ridge is None:
        ridge = default
    return ProbeVector(n=n, entries=vec, ridge=float(ridge))


def random_probe(
    n: int, seed: int, *, kind: str = "unit", ridge: float | None = None
) -> ProbeVector:
    """Random probe: 'unit' (normalized gaussian) or 'rademacher' (+-1)."""
    rng = np.random.default_rng(seed)
    if kind == "unit":
        vec = rng.standard_normal(n)
        vec /= np.linalg.norm(vec)
    elif kind == "rademacher":
        vec = rng.choice([-1.0, 1.0], size=n)
    else:
        raise ValueError(f"unknown probe kind {kind!r}")
    return build_probe(n, entries=vec, ridge=ridge)


@njit(cache=True)
def _gram_kernel(v, ridge, x_block, out_block):  # pragma: no cover
    n = v.shape[0]
    for i in range(n):
        t = 0.0
        for j in range(n):
            t += x_block[i, j] * v[j]
        for j in range(n):
            out_block[i, j] = t * v[j] + ridge * x_block[i, j]


@dataclass(frozen=True)
class ImplicitGram:
    """The operator (V^T V + ridge*I) on R^(n^2), applied blockwise.

    Block i of the input (length n) maps to (v.x_i) v + ridge*x_i, which
    is one fused pass over the input: O(n^2) total, no n^2 x n^2 storage.
    """

    probe: ProbeVector

    @property
    def dim(self) -> int:
        return self.probe.n * self.probe.n

    def __call__(self, x) -> np.ndarray:
        return self.matvec(x)

    def matvec(self, x) -> np.ndarray:
        # solver hot path: convert and check shape, skip the finiteness
        # scan; bad values pass through and show up in residual norms
        x = np.asarray(x, dtype=float)
        n = self.probe.n
        if x.ndim != 1 or x.shape[0] != n * n:
            raise DimensionMismatchError(
                f"operator dim is {n * n}, got vector of shape {x.shape}"
            )
        out = np.empty(n * n)
        _gram_kernel(
            self.probe.entries,
            self.probe.ridge,
            x.reshape(n, n),
            out.reshape(n, n),
        )
        return out

    def dense(self) -> np.ndarray:
        """Materialize the full n^2 x n^2 matrix. Guarded: n <= 64 only."""
        n = self.probe.n
        if n > 64:
            raise ValueError(f"refusing to materialize a {n * n}x{n * n} dense operator")
        v = self.probe.entries
        block = np.outer(v, v) + self.probe.ridge * np.eye(n)
        return np.kron(np.eye(n), block)

    @property
    def eig_max(self) -> float:
        """Largest eigenvalue: |v|^2 + ridge."""
        return self.probe.sq_norm + self.probe.ridge

    @property
    def eig_min(self) -> float:
        """Smallest eigenvalue: ridge (exact for n >= 2)."""
        if self.probe.n == 1:
            return self.eig_max
        return self.probe.ridge


@dataclass(frozen=True)
class ProbeSystem:
    """A concrete normal-equations instance G c = rhs.

    response is u = A(Bv); rhs is V^T u, whose block j equals u_j * v.
    """

    probe: ProbeVector
    response: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        response = as_vector(self.response)
        rhs = as_vector(self.rhs)
        n = self.probe.n
        if response.shape[0] != n:
            raise DimensionMismatchError(
                f"response has dim {response.shape[0]}, expected {n}"
            )
        if rhs.shape[0] != n * n:
            raise DimensionMismatchError(
                f"rhs has dim {rhs.shape[0]}, expected {n * n}"
            )
        response = response.copy()
        response.setflags(write=False)
        rhs = rhs.copy()
        rhs.setflags(write=False)
        object.__setattr__(self, "response", response)
        object.__setattr__(self, "rhs", rhs)

    @property
    def operator(self) -> ImplicitGram:
        return ImplicitGram(self.probe)


def compute_rhs(probe: ProbeVector, response) -> np.ndarray:
    """rhs = V^T u laid out block-major: block j is response_j * v."""
    response = as_vector(response)
    if response.shape[0] != probe.n:
        raise DimensionMismatchError(
            f"response has dim {response.shape[0]}, expected {probe.n}"
        )
    return np.outer(response, probe.entries).ravel()


def build_system(a, b, probe: ProbeVector) -> ProbeSystem:
    """Form the probe system for the product A B without computing it.

    Only two matrix-vector products are taken: u = A (B v).
    """
    a = as_matrix(a)
    b = as_matrix(b)
    n = probe.n
    if a.shape != (n, n) or b.shape != (n, n):
        raise DimensionMismatchError(
            f"expected two {n}x{n} matrices, got {a.shape} and {b.shape}"
        )
    response = matvec(a, matvec(b, probe.entries))
    return ProbeSystem(probe=probe, response=response, rhs=compute_rhs(probe, response))
