"""Evaluation harness: exact-oracle comparison, sampling baseline, sweeps.

This is where accuracy claims are adjudicated. The pipeline reports what
it computed; the harness compares that against matmul_exact and writes
the verdict down, including the cases where the approximation misses its
target. The delta_met flag is always the measured truth.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .matrix import GenSpec, as_matrix, gen_matrix, matmul_exact, matvec
from .norms import frobenius_norm, inf_norm, vec_p_norm
from .pipeline import ApproxConfig, ApproxResult, approx_multiply, flatten_product
from .solver import closed_form_solve, min_norm_solution

__all__ = [
    "ErrorReport",
    "SweepSpec",
    "BaselinePoint",
    "evaluate",
    "baseline_sampling",
    "sweep",
    "measure_time_per_apply",
    "REPORT_VERSION",
    "CSV_TIMING_COLUMNS",
]

REPORT_VERSION = 1

# columns that may legitimately differ between identical sweeps
CSV_TIMING_COLUMNS = ("time_build_s", "time_solve_s", "time_exact_s", "time_per_iter_s")


@dataclass(frozen=True)
class BaselinePoint:
    """One sampling-baseline measurement: sample count and its error."""

    s: int
    fro_rel: float


@dataclass(frozen=True)
class ErrorReport:
    """Measured quality of one approximate product vs the exact oracle.

    Field names deliberately match the JSON report schema. x_prime_norm
    is the magnitude of the solver's solution vector, x_dprime_norm that
    of the closed-form solution of the regularized system, x_tprime_norm
    that of the minimum-norm solution of the unregularized one.
    """

    n: int
    fro_abs: float
    fro_rel: float
    probe_residual: float
    iterations: int
    delta_target: float
    delta_met: bool
    m_prime: float
    x_prime_norm: float
    x_dprime_norm: float
    x_tprime_norm: float
    time_build_s: float
    time_solve_s: float
    time_exact_s: float
    seed: int | None = None
    baseline: tuple[BaselinePoint, ...] = ()

    def __post_init__(self):
        if self.fro_abs < 0:
            raise ValueError("fro_abs must be nonnegative")
        if self.delta_met != (self.fro_abs <= self.delta_target):
            raise ValueError("delta_met must equal (fro_abs <= delta_target)")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "fro_abs": self.fro_abs,
            "fro_rel": self.fro_rel,
            "probe_residual": self.probe_residual,
            "iterations": self.iterations,
            "delta_target": self.delta_target,
            "delta_met": self.delta_met,
            "m_prime": self.m_prime,
            "x_prime_norm": self.x_prime_norm,
            "x_dprime_norm": self.x_dprime_norm,
            "x_tprime_norm": self.x_tprime_norm,
            "time_build_s": self.time_build_s,
            "time_solve_s": self.time_solve_s,
            "time_exact_s": self.time_exact_s,
            "baseline": [{"s": p.s, "fro_rel": p.fro_rel} for p in self.baseline],
        }


def evaluate(
    a,
    b,
    config: ApproxConfig,
    *,
    seed: int | None = None,
    baseline_s: Sequence[int] = (),
    result: ApproxResult | None = None,
) -> ErrorReport:
    """Run the pipeline on (a, b) and measure it against the exact product.

    seed is recorded in the report and also salts the baseline sampling
    draws. A precomputed pipeline result may be passed to avoid running
    the approximation twice.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if result is None:
        result = approx_multiply(a, b, config)
    n = result.probe.n

    t0 = time.perf_counter()
    exact = matmul_exact(a, b)
    time_exact_s = time.perf_counter() - t0

    fro_abs = frobenius_norm(result.product - exact)
    denom = frobenius_norm(a) * frobenius_norm(b)
    fro_rel = fro_abs / denom if denom > 0 else 0.0
    probe_residual = vec_p_norm(
        matvec(result.product, result.probe.entries) - result.system.response
    )
    baseline = tuple(
        BaselinePoint(
            s=s,
            fro_rel=(
                frobenius_norm(baseline_sampling(a, b, s, seed=(seed or 0) + 31 * s) - exact)
                / denom
                if denom > 0
                else 0.0
            ),
        )
        for s in baseline_s
    )
    return ErrorReport(
        n=n,
        fro_abs=fro_abs,
        fro_rel=fro_rel,
        probe_residual=probe_residual,
        iterations=result.iterations,
        delta_target=config.delta,
        delta_met=bool(fro_abs <= config.delta),
        m_prime=inf_norm(exact),
        x_prime_norm=vec_p_norm(flatten_product(result.product)),
        x_dprime_norm=vec_p_norm(closed_form_solve(result.system)),
        x_tprime_norm=vec_p_norm(min_norm_solution(result.system)),
        time_build_s=result.wall_time_build,
        time_solve_s=result.wall_time_solve,
        time_exact_s=time_exact_s,
        seed=seed,
        baseline=baseline,
    )


def baseline_sampling(
    a, b, s: int, seed: int, *, with_replacement: bool = True
) -> np.ndarray:
    """Drineas-style uniform column/row sampling estimate of A B.

    Draws s column indices of A (and the matching rows of B), scales each
    pair by 1/sqrt(s p) with uniform p = 1/n, and multiplies the sampled
    factors. Without replacement and s = n this reproduces the exact
    product.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(
            f"expected two square matrices of equal size, got {a.shape} and {b.shape}"
        )
    n = a.shape[0]
    if not (1 <= s <= n):
        raise ValueError(f"sample count s must satisfy 1 <= s <= n={n}, got {s}")
    rng = np.random.default_rng(seed)
    if with_replacement:
        idx = rng.integers(0, n, size=s)
    else:
        idx = rng.choice(n, size=s, replace=False)
    scale = 1.0 / np.sqrt(s * (1.0 / n))  # applied to each factor
    return matmul_exact(a[:, idx] * scale, b[idx, :] * scale)


@dataclass(frozen=True)
class SweepSpec:
    """A grid of sizes and trials to run through evaluate."""

    sizes: tuple[int, ...]
    trials: int
    distribution: str = "uniform-signed"
    max_magnitude: float = 1.0
    seed: int = 0
    config: ApproxConfig = field(default_factory=lambda: ApproxConfig(delta=1e-6))
    baseline_s: tuple[int, ...] = ()

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "baseline_s", tuple(int(s) for s in self.baseline_s))
        if not sizes:
            raise ValueError("sizes must be nonempty")
        if any(x >= y for x, y in zip(sizes, sizes[1:])):
            raise ValueError(f"sizes must be strictly ascending, got {sizes}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


def measure_time_per_apply(
    result: ApproxResult, *, min_reps: int = 3, batches: int = 5
) -> float:
    """Amortized wall time of one Gram-operator application.

    The per-iteration solve cost is dominated by this application, so it
    is timed directly: enough repetitions to amortize timer noise, more
    for small operators where a single call is far below timer precision.
    The best batch mean is reported; scheduler hiccups only ever add time,
    so the minimum over batches is the steady-state cost.
    """
    operator = result.system.operator
    x = result.system.rhs.copy()
    n = result.probe.n
    reps = max(min_reps, 500_000 // (n * n))
    operator.matvec(x)  # warm any lazy compilation before the clock starts
    best = math.inf
    for _ in range(batches):
        t0 = time.perf_counter()
        for _ in range(reps):
            operator.matvec(x)
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def _trial_seed(spec: SweepSpec, size_index: int, trial: int) -> int:
    # distinct, deterministic seeds per (size, trial) cell
    return spec.seed + 7919 * size_index + trial


def sweep(
    spec: SweepSpec,
    report_path=None,
    csv_path=None,
) -> dict:
    """Run the grid, returning the report dict and writing JSON/CSV files.

    Per run the report records the full ErrorReport row plus the
    amortized per-iteration operator time; aggregates carry the median
    per-iteration time per size and its ratio to the previous size.
    """
    runs = []
    per_iter_by_n: dict[int, list[float]] = {n: [] for n in spec.sizes}
    iters_by_n: dict[int, list[int]] = {n: [] for n in spec.sizes}
    for size_index, n in enumerate(spec.sizes):
        for trial in range(spec.trials):
            base = _trial_seed(spec, size_index, trial)
            a = gen_matrix(
                GenSpec(n=n, distribution=spec.distribution,
                        max_magnitude=spec.max_magnitude, seed=2 * base)
            )
            b = gen_matrix(
                GenSpec(n=n, distribution=spec.distribution,
                        max_magnitude=spec.max_magnitude, seed=2 * base + 1)
            )
            result = approx_multiply(a, b, spec.config)
            report = evaluate(
                a, b, spec.config, seed=base, baseline_s=spec.baseline_s, result=result
            )
            time_per_iter = measure_time_per_apply(result)
            per_iter_by_n[n].append(time_per_iter)
            iters_by_n[n].append(report.iterations)
            row = report.to_json_dict()
            row["time_per_iter_s"] = time_per_iter
            runs.append(row)

    aggregates = []
    previous_median: float | None = None
    for n in spec.sizes:
        median_t = float(np.median(per_iter_by_n[n]))
        entry = {
            "n": n,
            "time_per_iter_s_median": median_t,
            "iterations_median": float(np.median(iters_by_n[n])),
            "time_per_iter_ratio_vs_prev": (
                median_t / previous_median if previous_median else None
            ),
        }
        previous_median = median_t
        aggregates.append(entry)

    report = {"version": REPORT_VERSION, "runs": runs, "aggregates": aggregates}
    if report_path is not None:
        _write_json(report, report_path)
    if csv_path is not None:
        _write_csv(runs, spec.baseline_s, csv_path)
    return report


def _write_json(report: dict, path) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(report, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(runs: list[dict], baseline_s: tuple[int, ...], path) -> None:
    columns = [
        "n", "seed", "fro_abs", "fro_rel", "probe_residual", "iterations",
        "delta_target", "delta_met", "m_prime",
        "x_prime_norm", "x_dprime_norm", "x_tprime_norm",
        "time_build_s", "time_solve_s", "time_exact_s", "time_per_iter_s",
    ]
    baseline_cols = [f"baseline_fro_rel_s{s}" for s in baseline_s]
    path = Path(path)
    try:
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(columns + baseline_cols)
            for run in runs:
                cells = [_csv_cell(run[c]) for c in columns]
                by_s = {p["s"]: p["fro_rel"] for p in run["baseline"]}
                cells += [_csv_cell(by_s[s]) for s in baseline_s]
                writer.writerow(cells)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
