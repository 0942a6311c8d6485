"""Approximate dense matrix products via a probe-vector linear system.

The exact product C = A B is observed only through its action on a probe
vector v. Recovering C's entries from C v = u is underdetermined, so the
package solves the regularized normal equations over an implicit
block-diagonal operator, reshapes the solution into the approximate
product, and ships a harness that measures honestly how far that product
is from the real one.
"""

from .harness import (
    BaselinePoint,
    ErrorReport,
    SweepSpec,
    baseline_sampling,
    evaluate,
    sweep,
)
from .matrix import (
    DISTRIBUTIONS,
    DimensionMismatchError,
    GenSpec,
    MatrixParseError,
    as_matrix,
    as_vector,
    gen_matrix,
    matmul_exact,
    matvec,
    read_matrix_csv,
    write_matrix_csv,
)
from .norms import (
    frobenius_norm,
    inf_norm,
    max_norm,
    operator_2_norm_symmetric,
    spectral_radius_symmetric,
    vec_p_norm,
)
from .pipeline import (
    ApproxConfig,
    ApproxResult,
    approx_multiply,
    default_rho_rule,
    flatten_product,
    reshape_solution,
)
from .probe import (
    ImplicitGram,
    ProbeSystem,
    ProbeVector,
    build_probe,
    build_system,
    compute_rhs,
    default_entry,
    random_probe,
)
from .solver import (
    DivergenceError,
    NotPositiveDefiniteError,
    SolverConfig,
    SolverReport,
    closed_form_solve,
    default_max_iters,
    min_norm_solution,
    steepest_descent,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # matrix
    "DimensionMismatchError", "MatrixParseError", "GenSpec", "DISTRIBUTIONS",
    "as_matrix", "as_vector", "matmul_exact", "matvec", "gen_matrix",
    "read_matrix_csv", "write_matrix_csv",
    # norms
    "vec_p_norm", "frobenius_norm", "inf_norm", "max_norm",
    "spectral_radius_symmetric", "operator_2_norm_symmetric",
    # probe
    "ProbeVector", "ProbeSystem", "ImplicitGram", "build_probe", "random_probe",
    "default_entry", "compute_rhs", "build_system",
    # solver
    "NotPositiveDefiniteError", "DivergenceError", "SolverConfig", "SolverReport",
    "steepest_descent", "closed_form_solve", "min_norm_solution", "default_max_iters",
    # pipeline
    "ApproxConfig", "ApproxResult", "default_rho_rule", "approx_multiply",
    "reshape_solution", "flatten_product",
    # harness
    "ErrorReport", "SweepSpec", "BaselinePoint", "evaluate", "baseline_sampling",
    "sweep",
]
