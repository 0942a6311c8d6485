"""End-to-end approximate multiplication.

approx_multiply never forms the exact product. It builds a probe system
from two matvecs, solves the regularized normal equations with the
configured solver, and reshapes the solution vector into the approximate
product row by row. Whether the result is actually close to the exact
product is a separate, measured question (see harness).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .matrix import DimensionMismatchError, as_matrix, as_vector
from .norms import max_norm
from .probe import ProbeSystem, ProbeVector, build_probe, build_system
from .solver import (
    SolverConfig,
    SolverReport,
    closed_form_solve,
    default_max_iters,
    steepest_descent,
)

__all__ = [
    "SOLVERS",
    "ApproxConfig",
    "ApproxResult",
    "default_rho_rule",
    "approx_multiply",
    "reshape_solution",
    "flatten_product",
]

SOLVERS = ("adaptive", "fixed", "closed-form")


def default_rho_rule(delta: float) -> float:
    """Solver residual target from the error target: delta/1.001.

    The slightly-tighter-than-delta choice keeps the solve target just
    inside the requested error budget.
    """
    return delta / 1.001


@dataclass(frozen=True)
class ApproxConfig:
    """Knobs for approx_multiply.

    delta is the requested Frobenius error target (recorded and checked
    by the harness, never assumed). schedule maps n to a ProbeVector;
    None selects the built-in 1/n^3 schedule. rho_rule maps delta to the
    solver's absolute residual target. max_iters None lets the solver
    budget follow the probe's condition bound. magnitude_bound, when
    given, rejects inputs with larger entries.
    """

    delta: float
    solver: str = "adaptive"
    schedule: Callable[[int], ProbeVector] | None = None
    rho_rule: Callable[[float], float] = field(default=default_rho_rule)
    max_iters: int | None = None
    magnitude_bound: float | None = None

    def __post_init__(self):
        if not (self.delta > 0.0):
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.magnitude_bound is not None and self.magnitude_bound < 0:
            raise ValueError("magnitude_bound must be nonnegative")

    @property
    def rho(self) -> float:
        """Absolute solver residual target derived from delta."""
        rho = float(self.rho_rule(self.delta))
        if not (rho > 0.0):
            raise ValueError(f"rho_rule produced a nonpositive target {rho}")
        return rho


@dataclass(frozen=True)
class ApproxResult:
    """Approximate product plus the run's accounting."""

    product: np.ndarray
    probe: ProbeVector
    system: ProbeSystem
    solver_report: SolverReport | None  # None for closed-form and zero right-hand sides
    wall_time_build: float
    wall_time_solve: float

    @property
    def iterations(self) -> int:
        return self.solver_report.iterations if self.solver_report else 0

    @property
    def converged(self) -> bool:
        """True unless an iterative solve stopped at its budget."""
        return self.solver_report is None or self.solver_report.converged


def reshape_solution(c, n: int) -> np.ndarray:
    """Row-major reshape of a length-n^2 solution vector to n x n."""
    c = as_vector(c)
    if c.shape[0] != n * n:
        raise DimensionMismatchError(
            f"solution has dim {c.shape[0]}, expected {n * n} for n={n}"
        )
    return c.reshape(n, n).copy()


def flatten_product(a) -> np.ndarray:
    """Inverse of reshape_solution: rows concatenated into one vector."""
    a = as_matrix(a)
    return a.ravel().copy()


def approx_multiply(a, b, config: ApproxConfig) -> ApproxResult:
    """Approximate C = A B through the probe system.

    A zero response vector short-circuits: the regularized system then
    has the unique solution zero, so the product is returned as the zero
    matrix with no solve.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionMismatchError(
            f"expected two square matrices of equal size, got {a.shape} and {b.shape}"
        )
    if config.magnitude_bound is not None:
        largest = max(max_norm(a), max_norm(b))
        if largest > config.magnitude_bound:
            raise ValueError(
                f"input entry magnitude {largest} exceeds bound {config.magnitude_bound}"
            )
    n = a.shape[0]

    t0 = time.perf_counter()
    probe = config.schedule(n) if config.schedule is not None else build_probe(n)
    if probe.n != n:
        raise DimensionMismatchError(
            f"schedule produced a probe of size {probe.n} for n={n}"
        )
    system = build_system(a, b, probe)
    wall_time_build = time.perf_counter() - t0

    t1 = time.perf_counter()
    if not np.any(system.response):
        solution = np.zeros(n * n)
        report = None
    elif config.solver == "closed-form":
        solution = closed_form_solve(system)
        report = None
    else:
        rho = config.rho
        max_iters = config.max_iters
        if max_iters is None:
            max_iters = default_max_iters(probe.condition_bound, rho)
        operator = system.operator
        solver_config = SolverConfig(
            target_residual=rho,
            max_iters=max_iters,
            variant="adaptive" if config.solver == "adaptive" else "fixed",
            eig_bounds=(operator.eig_min, operator.eig_max)
            if config.solver == "fixed"
            else None,
        )
        report = steepest_descent(operator.matvec, system.rhs, solver_config)
        solution = report.solution
    wall_time_solve = time.perf_counter() - t1

    return ApproxResult(
        product=reshape_solution(solution, n),
        probe=probe,
        system=system,
        solver_report=report,
        wall_time_build=wall_time_build,
        wall_time_solve=wall_time_solve,
    )
