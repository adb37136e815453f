"""High-precision perturbation-series eigensolver for fractional
Jacobi-type Sturm-Liouville problems.

The base operator's eigenpairs are generalized Jacobi functions; a potential
is folded in through a correction recursion whose rank-m truncation converges
super-exponentially when the progression ratio r_n = 4 ||q||_inf M_n is
below one (and usually well beyond that sufficient condition).
"""

from .diagnostics import (
    ConvergenceReport,
    apriori_bounds,
    closed_form_gap,
    coefficient_norm,
    convergence_report,
    correction_bound,
    formal_backward_gap,
    gap_limit_trend,
    majorant,
    norm_bound,
    potential_sup_norm,
    rayleigh_correction_oracle,
    spectral_gap_M,
)
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    FormatError,
    IoError,
    PoleError,
    PrecisionError,
    QuadratureError,
    SingularGapError,
    SolverError,
    SymmetryError,
)
from .fd_polynomial import (
    CorrectionState,
    EigenpairApproximation,
    PolynomialPotential,
    advance,
    eigenvalue_correction,
    eval_eigenfunction,
    init_state,
    run,
    solvability_residual,
)
from .fd_stepwise import (
    GeneralState,
    OverlapMatrix,
    build_overlap_matrix,
    closed_form_overlap,
    general_advance,
    run_general,
    step_potential_overlap,
    step_product_integral,
)
from .jacobi_basis import (
    BaseEigenpair,
    MultiplicationTable,
    OperatorParams,
    base_eigenvalue,
    base_eigenvalue_direct,
    base_spectrum,
    gjf_eval,
    jacobi_poly_eval,
    jacobi_weight,
    multiplication_coeffs,
    norm_gamma,
)
from .numerics import (
    PrecisionContext,
    Real,
    agree_digits,
    ensure_finite,
    gamma,
    stable,
    to_real,
)

__version__ = "0.1.0"

__all__ = [
    "BaseEigenpair",
    "ConfigError",
    "ConvergenceReport",
    "CorrectionState",
    "DivergenceError",
    "DomainError",
    "EigenpairApproximation",
    "FormatError",
    "GeneralState",
    "IoError",
    "MultiplicationTable",
    "OperatorParams",
    "OverlapMatrix",
    "PolynomialPotential",
    "PoleError",
    "PrecisionContext",
    "PrecisionError",
    "QuadratureError",
    "Real",
    "SingularGapError",
    "SolverError",
    "SymmetryError",
    "advance",
    "agree_digits",
    "apriori_bounds",
    "base_eigenvalue",
    "base_eigenvalue_direct",
    "base_spectrum",
    "build_overlap_matrix",
    "closed_form_gap",
    "closed_form_overlap",
    "coefficient_norm",
    "convergence_report",
    "correction_bound",
    "eigenvalue_correction",
    "ensure_finite",
    "eval_eigenfunction",
    "formal_backward_gap",
    "gamma",
    "gap_limit_trend",
    "general_advance",
    "gjf_eval",
    "init_state",
    "jacobi_poly_eval",
    "jacobi_weight",
    "majorant",
    "multiplication_coeffs",
    "norm_bound",
    "norm_gamma",
    "potential_sup_norm",
    "rayleigh_correction_oracle",
    "run",
    "run_general",
    "solvability_residual",
    "spectral_gap_M",
    "stable",
    "step_potential_overlap",
    "step_product_integral",
    "to_real",
    "__version__",
]
