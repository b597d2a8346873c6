"""Matrix q-calculus: q-special matrix functions, basic hypergeometric matrix
series, and the bilateral q-Kummer and q-Gauss difference equations."""
from .errors import (
    BranchCutViolation,
    DivisionByZero,
    EigenFailure,
    NotCommuting,
    NotPositiveStable,
    PoleEncountered,
    QMatFunError,
    SingularFactor,
    SingularGamma,
    SingularMatrix,
    TruncationNotConverged,
)
from .qcore import (
    DEFAULT_POLICY,
    QParameter,
    ResidualReport,
    SeriesResult,
    TruncationPolicy,
    jackson_integral_finite,
    jackson_integral_infinite,
    q_deriv_of_integral_check,
    q_derivative,
    q_derivative2,
    q_exp_E,
    q_exp_e_neg,
    q_integration_by_parts_check,
    q_number,
    q_pochhammer,
    q_pochhammer_inf,
    q_product_rule,
    q_quotient_rule,
)
from .qmatrix import (
    SpectralInfo,
    frobenius,
    is_singular,
    as_matrix,
    check_q_sigma_condition,
    mat_log_principal,
    matrix_q_pochhammer,
    matrix_q_pochhammer_inf,
    matrix_q_pochhammer_inv,
    q_bracket_matrix,
    q_power_matrix,
    spectral_info,
    z_power_matrix,
)
from .qspecial import (
    GammaEvalConfig,
    q_beta_integral,
    q_beta_matrix,
    q_gamma_inverse,
    q_gamma_matrix,
    verify_pochhammer_gamma_identity,
)
from .qseries import (
    FundamentalPair,
    HypergeometricSpec,
    SeriesCoefficients,
    convergence_probe,
    gauss_2phi1,
    gauss_fundamental_pair,
    kummer_1phi1,
    kummer_coefficients,
    kummer_fundamental_pair,
    kummer_solution_u1,
    kummer_solution_u2,
    gauss_solution_w2,
    rphis_matrix,
)
from .qdiffeq import (
    BilateralCoefficients,
    PointClassification,
    bilateral_residual,
    classify_singular_point,
    gauss_coeffs_bilateral,
    hypergeometric_operator_residual,
    exponential_kernel_u1,
    infinity_transform,
    integral_solution_u1,
    integral_solution_u2,
    kummer_coeffs_bilateral,
    kummer_shifted_residual,
    residual_report,
    u1_weight,
    u1_weight_recurrence_residual,
    u2_weight,
    u2_weight_recurrence_residual,
)

__version__ = "0.1.0"

__all__ = [
    "as_matrix",
    "bilateral_residual",
    "BilateralCoefficients",
    "BranchCutViolation",
    "check_q_sigma_condition",
    "classify_singular_point",
    "convergence_probe",
    "DEFAULT_POLICY",
    "DivisionByZero",
    "EigenFailure",
    "exponential_kernel_u1",
    "frobenius",
    "FundamentalPair",
    "GammaEvalConfig",
    "gauss_2phi1",
    "gauss_coeffs_bilateral",
    "gauss_fundamental_pair",
    "gauss_solution_w2",
    "hypergeometric_operator_residual",
    "HypergeometricSpec",
    "infinity_transform",
    "integral_solution_u1",
    "integral_solution_u2",
    "is_singular",
    "jackson_integral_finite",
    "jackson_integral_infinite",
    "kummer_1phi1",
    "kummer_coefficients",
    "kummer_coeffs_bilateral",
    "kummer_fundamental_pair",
    "kummer_shifted_residual",
    "kummer_solution_u1",
    "kummer_solution_u2",
    "mat_log_principal",
    "matrix_q_pochhammer",
    "matrix_q_pochhammer_inf",
    "matrix_q_pochhammer_inv",
    "NotCommuting",
    "NotPositiveStable",
    "PointClassification",
    "PoleEncountered",
    "q_beta_integral",
    "q_beta_matrix",
    "q_bracket_matrix",
    "q_deriv_of_integral_check",
    "q_derivative",
    "q_derivative2",
    "q_exp_E",
    "q_exp_e_neg",
    "q_gamma_inverse",
    "q_gamma_matrix",
    "q_integration_by_parts_check",
    "q_number",
    "q_pochhammer",
    "q_pochhammer_inf",
    "q_power_matrix",
    "q_product_rule",
    "q_quotient_rule",
    "QMatFunError",
    "QParameter",
    "residual_report",
    "ResidualReport",
    "rphis_matrix",
    "SeriesCoefficients",
    "SeriesResult",
    "SingularFactor",
    "SingularGamma",
    "SingularMatrix",
    "spectral_info",
    "SpectralInfo",
    "TruncationNotConverged",
    "TruncationPolicy",
    "u1_weight",
    "u1_weight_recurrence_residual",
    "u2_weight",
    "u2_weight_recurrence_residual",
    "verify_pochhammer_gamma_identity",
    "z_power_matrix",
]
