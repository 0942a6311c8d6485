"""Dense matrix and vector primitives.

Matrices are 2-D float64 ndarrays (row-major), vectors are 1-D float64
ndarrays, and every entry must be finite. The exact product here is the
reference oracle for the whole package: it runs the plain cubic schedule
with a fixed summation order, so results are bit-reproducible and do not
depend on whatever BLAS happens to be linked.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

__all__ = [
    "DimensionMismatchError",
    "MatrixParseError",
    "GenSpec",
    "DISTRIBUTIONS",
    "as_matrix",
    "as_vector",
    "matmul_exact",
    "matvec",
    "gen_matrix",
    "read_matrix_csv",
    "write_matrix_csv",
]


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class MatrixParseError(ValueError):
    """A matrix file could not be parsed; carries 1-based line/field."""

    def __init__(self, message: str, line: int | None = None, field: int | None = None):
        super().__init__(message)
        self.line = line
        self.field = field


def as_matrix(data) -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    a = np.asarray(data, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite (no NaN/inf)")
    return a


def as_vector(data) -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite (no NaN/inf)")
    return x


@njit(cache=True)
def _matmul_kernel(a, b, out):  # pragma: no cover - exercised via matmul_exact
    rows, inner = a.shape
    cols = b.shape[1]
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            # k ascending; the fixed order is what makes the oracle
            # bit-reproducible.
            for k in range(inner):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc


@njit(cache=True)
def _matvec_kernel(a, x, out):  # pragma: no cover - exercised via matvec
    rows, cols = a.shape
    for i in range(rows):
        acc = 0.0
        for j in range(cols):
            acc += a[i, j] * x[j]
        out[i] = acc


def matmul_exact(a, b) -> np.ndarray:
    """Exact product C = A B by the naive cubic schedule (k ascending)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    out = np.empty((a.shape[0], b.shape[1]))
    _matmul_kernel(np.ascontiguousarray(a), np.ascontiguousarray(b), out)
    return out


def matvec(a, x) -> np.ndarray:
    """Matrix-vector product y[i] = sum_j A[i,j] x[j], j ascending."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise DimensionMismatchError(
            f"cannot apply {a.shape[0]}x{a.shape[1]} matrix to a vector of dim {x.shape[0]}"
        )
    out = np.empty(a.shape[0])
    _matvec_kernel(np.ascontiguousarray(a), x, out)
    return out


DISTRIBUTIONS = ("uniform-signed", "uniform-nonneg", "integer-grid", "identity", "zero")


@dataclass(frozen=True)
class GenSpec:
    """Deterministic test-matrix recipe.

    Every generated entry satisfies |entry| <= max_magnitude, and identical
    specs always produce identical matrices.
    """

    n: int
    distribution: str
    max_magnitude: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(
                f"unknown distribution {self.distribution!r}; choose from {DISTRIBUTIONS}"
            )
        if self.max_magnitude < 0:
            raise ValueError("max_magnitude must be nonnegative")
        if self.distribution == "identity" and self.max_magnitude < 1:
            raise ValueError("identity entries are 0/1, so max_magnitude must be >= 1")


def gen_matrix(spec: GenSpec) -> np.ndarray:
    """n x n matrix drawn deterministically from a GenSpec's seed."""
    n, bound = spec.n, spec.max_magnitude
    rng = np.random.default_rng(spec.seed)
    if spec.distribution == "uniform-signed":
        return rng.uniform(-bound, bound, size=(n, n))
    if spec.distribution == "uniform-nonneg":
        return rng.uniform(0.0, bound, size=(n, n))
    if spec.distribution == "integer-grid":
        hi = int(np.floor(bound))
        return rng.integers(-hi, hi + 1, size=(n, n)).astype(np.float64)
    if spec.distribution == "identity":
        return np.eye(n)
    return np.zeros((n, n))


def write_matrix_csv(a, path) -> None:
    """Write one matrix row per line, comma separated, shortest round-trip floats."""
    a = as_matrix(a)
    lines = [",".join(repr(float(x)) for x in row) for row in a]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    """Parse a CSV matrix; raises MatrixParseError naming line/field on bad input."""
    text = Path(path).read_text()
    lines = text.splitlines()
    # trailing blank lines are tolerated, interior ones are not
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise MatrixParseError(f"{path}: empty matrix file", line=1)

    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise MatrixParseError(
                f"{path}: ragged row at line {lineno} "
                f"(expected {width} fields, found {len(fields)})",
                line=lineno,
            )
        row = []
        for fieldno, field in enumerate(fields, start=1):
            try:
                value = float(field)
            except ValueError:
                raise MatrixParseError(
                    f"{path}: non-numeric field at line {lineno}, field {fieldno}: {field!r}",
                    line=lineno,
                    field=fieldno,
                ) from None
            if not np.isfinite(value):
                raise MatrixParseError(
                    f"{path}: non-finite value at line {lineno}, field {fieldno}: {field!r}",
                    line=lineno,
                    field=fieldno,
                )
            row.append(value)
        rows.append(row)
    return np.array(rows, dtype=np.float64)
