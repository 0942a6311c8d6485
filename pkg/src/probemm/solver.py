"""Steepest-descent solver for symmetric positive definite systems.

Two step-size rules are provided. The adaptive rule picks the exact
line-search step r.r / r.Ar each iteration; the fixed rule uses the
classical optimum 2/(eig_max + eig_min) for a known spectrum. Residuals
are updated incrementally (one operator application per iteration) and
recomputed from scratch periodically, and once more before convergence
is declared, so a reported converged run really does satisfy the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log
from typing import Callable

import numpy as np

from .matrix import as_vector

__all__ = [
    "NotPositiveDefiniteError",
    "DivergenceError",
    "SolverConfig",
    "SolverReport",
    "steepest_descent",
    "closed_form_solve",
    "min_norm_solution",
    "default_max_iters",
]

# recompute the true residual every this many incremental updates
_REFRESH_EVERY = 50


class NotPositiveDefiniteError(RuntimeError):
    """The operator produced r.Ar <= 0 for a nonzero residual."""


class DivergenceError(RuntimeError):
    """The residual norm grew without bound."""


def default_max_iters(condition_bound: float, target_residual: float) -> int:
    """Iteration budget from the condition bound and relative target.

    Steepest descent contracts the error by (kappa-1)/(kappa+1) per step,
    so kappa*ln(1/rho) steps suffice; a 10x safety factor absorbs the
    norm in which progress is measured.
    """
    if condition_bound < 1.0:
        raise ValueError(f"condition bound must be >= 1, got {condition_bound}")
    if not (0.0 < target_residual < 1.0):
        return 10
    return 10 * max(1, ceil(condition_bound * log(1.0 / target_residual) + 1.0))


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule and step-size variant for steepest descent.

    target_residual is absolute: stop once |b - A x| <= target_residual.
    variant 'adaptive' needs nothing else; 'fixed' requires eig_bounds =
    (eig_min, eig_max) for the operator's spectrum.
    """

    target_residual: float
    max_iters: int
    variant: str = "adaptive"
    eig_bounds: tuple[float, float] | None = None
    track_residuals: bool = True
    keep_residual_vectors: bool = False  # memory-heavy; for diagnostics/tests

    def __post_init__(self):
        if not (self.target_residual >= 0.0):
            raise ValueError(f"target_residual must be >= 0, got {self.target_residual}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.variant not in ("adaptive", "fixed"):
            raise ValueError(f"variant must be 'adaptive' or 'fixed', got {self.variant!r}")
        if self.variant == "fixed":
            if self.eig_bounds is None:
                raise ValueError("fixed-step variant requires eig_bounds=(eig_min, eig_max)")
            lo, hi = self.eig_bounds
            if not (0.0 < lo <= hi):
                raise ValueError(f"eig_bounds must satisfy 0 < min <= max, got {self.eig_bounds}")


@dataclass(frozen=True)
class SolverReport:
    """Outcome of a steepest-descent run.

    residual_vectors holds the residuals each iteration stepped on (one
    per iteration, in order) and is filled only when the config asks for
    it. refreshes lists the iterations whose residual came from a
    from-scratch recompute instead of the incremental update; the
    residual recursion restarts at those points.
    """

    solution: np.ndarray
    iterations: int
    residual_norms: tuple[float, ...]
    step_sizes: tuple[float, ...]
    terminated_by: str  # 'converged' or 'max_iters'
    operator_applications: int
    residual_vectors: tuple[np.ndarray, ...] = ()
    refreshes: tuple[int, ...] = ()

    @property
    def final_residual(self) -> float:
        return self.residual_norms[-1]

    @property
    def converged(self) -> bool:
        return self.terminated_by == "converged"


def steepest_descent(
    apply_op: Callable[[np.ndarray], np.ndarray],
    b,
    config: SolverConfig,
) -> SolverReport:
    """Solve A x = b for SPD A, starting from x = 0.

    Raises NotPositiveDefiniteError if the operator betrays indefiniteness
    and DivergenceError if the residual norm blows past 1e8 times its
    starting value (possible only with a bad fixed step).
    """
    b = as_vector(b)
    x = np.zeros_like(b)
    r = b.copy()  # residual b - A x at x = 0
    rnorm = float(np.linalg.norm(r))
    norms = [rnorm]
    steps: list[float] = []
    stepped_residuals: list[np.ndarray] = []
    restarts: list[int] = []
    fresh_r = False
    applications = 0
    divergence_ceiling = 1e8 * max(rnorm, 1.0)

    if config.variant == "fixed":
        lo, hi = config.eig_bounds  # type: ignore[misc]
        fixed_alpha = 2.0 / (lo + hi)

    iters = 0
    since_refresh = 0
    while True:
        if rnorm <= config.target_residual:
            # trust but verify: the incremental residual drifts, so make
            # the claim only after a fresh recompute
            if since_refresh > 0:
                r = b - apply_op(x)
                applications += 1
                rnorm = float(np.linalg.norm(r))
                norms[-1] = rnorm
                since_refresh = 0
                fresh_r = True
                if rnorm > config.target_residual:
                    continue
            return SolverReport(
                solution=x,
                iterations=iters,
                residual_norms=tuple(norms) if config.track_residuals else (rnorm,),
                step_sizes=tuple(steps) if config.track_residuals else (),
                terminated_by="converged",
                operator_applications=applications,
                residual_vectors=tuple(stepped_residuals),
                refreshes=tuple(restarts),
            )
        if iters >= config.max_iters:
            return SolverReport(
                solution=x,
                iterations=iters,
                residual_norms=tuple(norms) if config.track_residuals else (rnorm,),
                step_sizes=tuple(steps) if config.track_residuals else (),
                terminated_by="max_iters",
                operator_applications=applications,
                residual_vectors=tuple(stepped_residuals),
                refreshes=tuple(restarts),
            )

        ar = apply_op(r)
        applications += 1
        if config.variant == "adaptive":
            rr = float(r @ r)
            rar = float(r @ ar)
            if rar <= 0.0:
                raise NotPositiveDefiniteError(
                    f"r.Ar = {rar} <= 0 on iteration {iters}; operator is not SPD"
                )
            alpha = rr / rar
        else:
            alpha = fixed_alpha

        if fresh_r:
            restarts.append(iters)
            fresh_r = False
        if config.keep_residual_vectors:
            stepped_residuals.append(r.copy())
        x = x + alpha * r
        iters += 1
        since_refresh += 1
        if since_refresh >= _REFRESH_EVERY:
            r = b - apply_op(x)
            applications += 1
            since_refresh = 0
            fresh_r = True
        else:
            r = r - alpha * ar
        rnorm = float(np.linalg.norm(r))
        norms.append(rnorm)
        steps.append(alpha)
        if not np.isfinite(rnorm) or rnorm > divergence_ceiling:
            raise DivergenceError(
                f"residual grew to {rnorm:.3e} after {iters} iterations"
            )


def closed_form_solve(system) -> np.ndarray:
    """Direct solution of the probe system via rank-one inversion.

    Each Gram block is v v^T + ridge*I, and each rhs block is u_j v, a
    multiple of the block's top eigenvector. The inverse acts on v as
    division by (|v|^2 + ridge), so block j of the solution is
    u_j v / (|v|^2 + ridge). No iteration, exact up to rounding.
    """
    probe = system.probe
    scale = probe.sq_norm + probe.ridge
    return np.outer(system.response / scale, probe.entries).ravel()


def min_norm_solution(system) -> np.ndarray:
    """Minimum-norm solution of the unregularized system V c = u.

    Blockwise u_j v / |v|^2; the ridge-free limit of the closed form.
    """
    probe = system.probe
    return np.outer(system.response / probe.sq_norm, probe.entries).ravel()
