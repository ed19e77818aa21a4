"""Triangular test matrices whose eigenvectors outgrow every native float range,
with an exact closed-form oracle, overflow-robust solvers, and conditioning reports.
"""

from .conditioning import (
    CondReport,
    PerturbStats,
    condition_report,
    eigenvalue_sensitivity,
    perturbation_experiment,
    skeel_bound,
    skeel_exact,
)
from .extscalar import OUT_OF_RANGE, ExtScalar, normalize
from .matgen import (
    GammaRatio,
    GeneralSystem,
    MatrixParams,
    Orientation,
    TriMatrix,
    build_A,
    build_eigvec_subsystem,
    flip,
    matrix_market_string,
    read_matrix_market,
    write_matrix_market,
)
from .oracle import (
    Asymptotics,
    EigenDecomposition,
    FractionMatrix,
    GrowthFloorReport,
    GrowthSequence,
    OmegaSequence,
    classify_asymptotics,
    eigenvalues,
    eigenvector_matrix,
    growth_floor_check,
    growth_sequence,
    inverse_closed_form,
    skeel_vectors,
    solve_closed_form,
)
from .solver import (
    Method,
    ScaledVector,
    SolveOutcome,
    SolveStatus,
    eigenvectors,
    ext_solve,
    naive_solve,
    residual,
    robust_solve,
    structured_residuals,
)

__version__ = "0.1.0"

__all__ = [
    "Asymptotics",
    "CondReport",
    "EigenDecomposition",
    "ExtScalar",
    "FractionMatrix",
    "GammaRatio",
    "GeneralSystem",
    "GrowthFloorReport",
    "GrowthSequence",
    "MatrixParams",
    "Method",
    "OmegaSequence",
    "Orientation",
    "OUT_OF_RANGE",
    "PerturbStats",
    "ScaledVector",
    "SolveOutcome",
    "SolveStatus",
    "TriMatrix",
    "build_A",
    "build_eigvec_subsystem",
    "classify_asymptotics",
    "condition_report",
    "eigenvalue_sensitivity",
    "eigenvalues",
    "eigenvector_matrix",
    "eigenvectors",
    "ext_solve",
    "flip",
    "growth_floor_check",
    "growth_sequence",
    "inverse_closed_form",
    "matrix_market_string",
    "naive_solve",
    "normalize",
    "perturbation_experiment",
    "read_matrix_market",
    "residual",
    "robust_solve",
    "skeel_bound",
    "skeel_exact",
    "skeel_vectors",
    "solve_closed_form",
    "structured_residuals",
    "write_matrix_market",
]
