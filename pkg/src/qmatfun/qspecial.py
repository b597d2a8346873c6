"""q-Gamma and q-Beta matrix functions."""
from dataclasses import dataclass, field

import numpy as np

from .errors import NotPositiveStable, SingularFactor, SingularGamma
from .qcore import (
    DEFAULT_POLICY,
    ResidualReport,
    SeriesResult,
    TruncationPolicy,
    as_qparam,
    jackson_integral_finite,
    q_exp_E,
    q_pochhammer_inf,
)
from .qmatrix import (
    as_matrix,
    frobenius,
    is_singular,
    matrix_q_pochhammer,
    matrix_q_pochhammer_inf,
    q_bracket_matrix,
    q_power_matrix,
    require_commuting,
    spectral_info,
    z_power_matrix,
)


@dataclass(frozen=True)
class GammaEvalConfig:
    policy: TruncationPolicy = field(default_factory=lambda: DEFAULT_POLICY)
    require_positive_stable: bool = True


DEFAULT_GAMMA_CONFIG = GammaEvalConfig()


def _require_positive_stable(P, name):
    info = spectral_info(P)
    if not info.positive_stable:
        raise NotPositiveStable(f"{name} is not positive stable (beta = {info.beta:.3g})")


def q_gamma_matrix(P, qp, cfg=None) -> SeriesResult:
    """Gamma_q(P) = int_0^{1/(1-q)} u^(P-I) E_q(-qu) d_q u, as a Jackson sum.

    The nodes are u = q^j / (1 - q); u^(P-I) is the principal matrix power.
    """
    qp = as_qparam(qp)
    cfg = cfg or DEFAULT_GAMMA_CONFIG
    P = as_matrix(P, "P")
    if cfg.require_positive_stable:
        _require_positive_stable(P, "P")
    shift = P - np.eye(len(P))

    def integrand(u):
        weight = q_exp_E(-qp.q * u, qp, cfg.policy).value
        if weight == 0:
            return np.zeros_like(P)
        return z_power_matrix(u, shift) * weight

    return jackson_integral_finite(integrand, 1 / qp.one_minus_q, qp, cfg.policy)


def q_gamma_inverse(P, qp, n=1, cfg=None):
    """Gamma_q(P)^-1 = [P]_q [P+I]_q ... [P+(n-1)I]_q Gamma_q(P+nI)^-1.

    Only P + nI has to be positive stable, so this also reaches arguments
    where the defining integral diverges.
    """
    qp = as_qparam(qp)
    P = as_matrix(P, "P")
    if n < 1:
        raise ValueError("n must be a positive integer")
    eye = np.eye(len(P))
    shifted = P + n * eye
    if (cfg or DEFAULT_GAMMA_CONFIG).require_positive_stable:
        _require_positive_stable(shifted, "P + nI")
    G = q_gamma_matrix(shifted, qp, cfg).value
    if is_singular(G):
        raise SingularGamma("Gamma_q(P + nI) is singular")
    prefix = eye.astype(complex)
    for k in range(n):
        prefix = prefix @ q_bracket_matrix(P + k * eye, qp)
    return prefix @ np.linalg.inv(G)


def q_beta_integral(P, Q, qp, policy=None) -> SeriesResult:
    """B_q(P, Q) = int_0^1 (uq; q)_inf (u q^Q; q)_inf^-1 u^(P-I) d_q u."""
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    P, Q = as_matrix(P, "P"), as_matrix(Q, "Q")
    qQ = q_power_matrix(qp, Q)
    shift = P - np.eye(len(P))

    def integrand(u):
        scalar = q_pochhammer_inf(u * qp.q, qp, policy).value
        denom = matrix_q_pochhammer_inf(u * qQ, qp, policy).value
        if is_singular(denom):
            raise SingularFactor(0, f"(u q^Q; q)_inf is singular at u = {u}")
        return scalar * np.linalg.solve(denom, z_power_matrix(u, shift))

    return jackson_integral_finite(integrand, 1.0, qp, policy)


def q_beta_matrix(P, Q, qp, cfg=None, cross_check=True) -> SeriesResult:
    """B_q(P, Q) = Gamma_q(P) Gamma_q(Q) Gamma_q(P+Q)^-1 for commuting P, Q.

    The returned value is the gamma-product route.  With ``cross_check`` the
    Jackson sum of the defining integral is also computed and stored in
    ``aux["integral"]``.
    """
    qp = as_qparam(qp)
    cfg = cfg or DEFAULT_GAMMA_CONFIG
    P, Q = as_matrix(P, "P"), as_matrix(Q, "Q")
    require_commuting(P, Q, "P and Q")
    _require_positive_stable(P, "P")
    _require_positive_stable(Q, "Q")
    gp = q_gamma_matrix(P, qp, cfg)
    gq = q_gamma_matrix(Q, qp, cfg)
    gpq = q_gamma_matrix(P + Q, qp, cfg)
    if is_singular(gpq.value):
        raise SingularGamma("Gamma_q(P + Q) is singular")
    value = gp.value @ gq.value @ np.linalg.inv(gpq.value)
    result = SeriesResult(value, max(gp.terms_used, gq.terms_used, gpq.terms_used),
                          max(gp.tail_estimate, gq.tail_estimate, gpq.tail_estimate))
    if cross_check:
        integral = q_beta_integral(P, Q, qp, cfg.policy)
        result.aux["integral"] = integral.value
        result.aux["integral_terms"] = integral.terms_used
        result.aux["route_difference"] = frobenius(integral.value - value)
    return result


def verify_pochhammer_gamma_identity(P, qp, n, cfg=None):
    """Residual of (q^P; q)_n = (1-q)^n Gamma_q(P)^-1 Gamma_q(P + nI).

    Returns a :class:`ResidualReport` with one point labelled by ``n``.
    """
    qp = as_qparam(qp)
    P = as_matrix(P, "P")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return ResidualReport.from_points([(0, 0.0)], tolerance_used=0.0)
    _require_positive_stable(P, "P")
    lhs = matrix_q_pochhammer(P, qp, n)
    g = q_gamma_matrix(P, qp, cfg).value
    gn = q_gamma_matrix(P + n * np.eye(len(P)), qp, cfg).value
    rhs = qp.one_minus_q ** n * np.linalg.solve(g, gn)
    return ResidualReport.from_points([(n, frobenius(lhs - rhs))])
