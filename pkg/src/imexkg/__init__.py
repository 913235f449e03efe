"""Toolkit for implicit-explicit Runge-Kutta pairs of the IMKG family.

Construction from stability targets, order-condition verification, linear
and split-system stability analysis, and a split-ODE integrator with a
Newton stage solver demonstrated on a single-column acoustic model.
"""
from .construct import (
    BUILTIN_TARGETS,
    DerivationError,
    PolynomialTarget,
    alpha_from_polynomial,
    builtin_target,
    derive_imkg2,
    derive_imkg3_q4,
    phat_degree,
)
from .hevi import (
    HStabilityGrid,
    hstability_matrix,
    kernel_name,
    min_gamma,
    region_T_contained,
    scan_grid,
    spectral_radius,
    stable_column_width,
    write_grid_csv,
)
from .integrate import (
    BlowUpError,
    ConvergenceTable,
    IntegrationError,
    NewtonConfig,
    NewtonError,
    SplitOdeProblem,
    Trajectory,
    convergence_study,
    imex_step,
    integrate,
    newton_stage,
    wrms_norm,
)
from .order import (
    OrderReport,
    check_order2_general,
    check_order3_general,
    check_order_compact,
    classify_order,
)
from .problems import (
    ColumnBackground,
    StateOutOfDomainError,
    acoustic_column,
    column_stage_solve,
    dahlquist_split,
    default_background,
    hevi_problem,
    hydrostatic_state,
    perturb_phi,
)
from .registry import (
    FLAG_INCONSISTENT,
    MISSING_METHODS,
    PUBLISHED_PROPERTIES,
    NormalizationResult,
    RawCoefficientRecord,
    UnknownMethodError,
    clean_methods,
    lookup,
    normalize_raw,
    registry,
)
from .stability import (
    RationalStabilityFunction,
    StabilityPolynomial,
    StabilityReport,
    classify_kg,
    explicit_polynomial_general,
    imaginary_axis_limit,
    imkg_explicit_polynomial,
    implicit_stability_function,
    sigma_hat_closed_form,
    stability_report,
)
from .tableau import (
    ButcherTableau,
    DoubleTableau,
    ImkgCoefficients,
    TableauError,
    TableauFileError,
    expand_imkg,
    read_tableau_file,
    write_tableau_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
