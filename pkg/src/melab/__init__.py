"""melab: Frechet calculus of matrix functions, phi-entropies of random matrices and membership checks.

The Jacobi eigensolver runs in a compiled extension when one is available and
in NumPy otherwise; :data:`BACKEND` names the active kernel.
"""
from melab._kernels import BACKEND
from melab.catalog import (
    Affine,
    Canonical,
    CanonicalMeasure,
    Power,
    PhiFunction,
    StandardEntropy,
    canonical_f,
    canonical_fprime,
    canonical_phi,
    g_kernel,
    hermite_check,
    k_kernel,
    random_canonical,
    spec_from_json,
    sufficient_hypothesis_check,
    zero_limit_estimate,
)
from melab.entropy import MatrixEnsemble, matrix_phi_entropy, trace_phi
from melab.errors import (
    DegenerateKernelError,
    DimensionError,
    DomainError,
    EighConvergenceError,
    MelabError,
    NotHermitianError,
    NumericalInstabilityError,
    SingularDifferentialError,
    SkipBudgetExceeded,
)
from melab.membership import (
    ConditionVerdict,
    EquivalenceReport,
    ViolationReport,
    check_condition,
    check_condition_i,
    check_condition_ii,
    check_condition_iii,
    check_condition_iv,
    cross_equivalence,
    search_counterexample,
)
from melab.spectral import (
    ScalarFunction,
    SpectralDecomposition,
    Superoperator,
    apply_univariate,
    bivariate_calculus,
    divided_difference,
    eigh,
    eigvalsh,
    frechet_diff,
    frechet_diff_inverse,
    left_right_superops,
    loewner_matrix,
    min_eigenvalue,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Affine",
    "Canonical",
    "CanonicalMeasure",
    "Power",
    "PhiFunction",
    "StandardEntropy",
    "canonical_f",
    "canonical_fprime",
    "canonical_phi",
    "g_kernel",
    "hermite_check",
    "k_kernel",
    "random_canonical",
    "spec_from_json",
    "sufficient_hypothesis_check",
    "zero_limit_estimate",
    "MatrixEnsemble",
    "matrix_phi_entropy",
    "trace_phi",
    "DegenerateKernelError",
    "DimensionError",
    "DomainError",
    "EighConvergenceError",
    "MelabError",
    "NotHermitianError",
    "NumericalInstabilityError",
    "SingularDifferentialError",
    "SkipBudgetExceeded",
    "ConditionVerdict",
    "EquivalenceReport",
    "ViolationReport",
    "check_condition",
    "check_condition_i",
    "check_condition_ii",
    "check_condition_iii",
    "check_condition_iv",
    "cross_equivalence",
    "search_counterexample",
    "ScalarFunction",
    "SpectralDecomposition",
    "Superoperator",
    "apply_univariate",
    "bivariate_calculus",
    "divided_difference",
    "eigh",
    "eigvalsh",
    "frechet_diff",
    "frechet_diff_inverse",
    "left_right_superops",
    "loewner_matrix",
    "min_eigenvalue",
]
