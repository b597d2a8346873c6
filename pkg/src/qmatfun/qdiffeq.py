"""Bilateral second-order matrix q-difference equations.

The general equation is

    phi1 D^2U + D^2U phi2 + phi3 DU + DU phi4 + phi5 DU phi6 + phi7 U phi8 = 0

with D the q-derivative in z.  This module evaluates its left-hand side on
candidate solutions (exact difference quotients, no numerical
differentiation), provides the coefficient bundles of the q-Kummer and
q-Gauss equations and of the Kummer equation at infinity, classifies points,
and evaluates the two Jackson-integral solutions of the Kummer equation.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DivisionByZero, NotPositiveStable, SingularFactor
from .qcore import (
    DEFAULT_POLICY,
    ResidualReport,
    SeriesResult,
    TruncationPolicy,
    accumulate,
    jackson_integral_finite,
    as_qparam,
    jackson_integral_infinite,
    q_exp_E,
    q_exp_e_neg,
    q_pochhammer_inf,
)
from .qmatrix import (
    as_matrix,
    frobenius,
    is_singular,
    matrix_q_pochhammer_inf,
    q_bracket_matrix,
    q_power_matrix,
    require_commuting,
    spectral_info,
    z_power_matrix,
)
from .qspecial import GammaEvalConfig, q_gamma_matrix

__all__ = [
    "BilateralCoefficients",
    "PointClassification",
    "ResidualReport",
    "bilateral_residual",
    "classify_singular_point",
    "exponential_kernel_u1",
    "gauss_coeffs_bilateral",
    "hypergeometric_operator_residual",
    "infinity_transform",
    "integral_solution_u1",
    "integral_solution_u2",
    "kummer_coeffs_bilateral",
    "kummer_shifted_residual",
    "residual_report",
    "u1_weight",
    "u1_weight_recurrence_residual",
    "u2_weight",
    "u2_weight_recurrence_residual",
]


@dataclass
class BilateralCoefficients:
    """The eight coefficient handles phi1..phi8 of a bilateral equation.

    ``phi[i]`` is a callable z -> (p, p) matrix or ``None`` for an
    identically zero coefficient.  ``base`` is the q of the D_q operator; it
    may exceed one in modulus (the equation at infinity uses 1/q).
    """

    phi: Sequence[Optional[Callable]]
    p: int
    base: complex

    def __post_init__(self):
        self.phi = tuple(self.phi)
        if len(self.phi) != 8:
            raise ValueError("exactly eight coefficient handles are required")
        self.base = complex(self.base)

    @classmethod
    def from_mapping(cls, mapping: Dict[int, Callable], p, base):
        """Build from ``{index: handle}`` with 1-based indices; missing ones are zero."""
        bad = set(mapping) - set(range(1, 9))
        if bad:
            raise ValueError(f"coefficient indices must be 1..8, got {sorted(bad)}")
        return cls([mapping.get(i) for i in range(1, 9)], p, base)

    def is_zero(self, i):
        return self.phi[i - 1] is None

    def __call__(self, i, z):
        f = self.phi[i - 1]
        if f is None:
            return np.zeros((self.p, self.p), dtype=complex)
        return np.asarray(f(z), dtype=complex)


def _const(M):
    return lambda z: M


def bilateral_residual(coeffs: BilateralCoefficients, U: Callable, z, qp=None):
    """Left-hand side of the bilateral equation for the candidate U at z.

    U is sampled at z, qz and q^2 z.  ``qp`` overrides ``coeffs.base``.
    """
    q = coeffs.base if qp is None else as_qparam(qp).q
    if z == 0 or q * z == 0:
        raise DivisionByZero("the residual needs z != 0")
    u0, u1, u2 = U(z), U(q * z), U(q * q * z)
    d0 = (u0 - u1) / ((1 - q) * z)
    d1 = (u1 - u2) / ((1 - q) * q * z)
    dd = (d0 - d1) / ((1 - q) * z)
    c = lambda i: coeffs(i, z)  # noqa: E731
    out = c(1) @ dd + dd @ c(2) + c(3) @ d0 + d0 @ c(4)
    out = out + c(5) @ d0 @ c(6) + c(7) @ u0 @ c(8)
    return out


def residual_report(residual: Callable, points, tol=None, note=""):
    """Evaluate ``residual(z)`` (a matrix) at each point and collect Frobenius norms."""
    return ResidualReport.from_points([(z, frobenius(residual(z))) for z in points],
                                      tolerance_used=tol, note=note)


def kummer_coeffs_bilateral(S, T, qp) -> BilateralCoefficients:
    """Coefficients of z D^2U q^T + DU [T]_q - q^S z DU - [S]_q U = 0.

    phi2 = z q^T, phi3 = -z q^S, phi4 = [T]_q, phi7 = -[S]_q, phi8 = I.
    """
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    qS, qT = q_power_matrix(qp, S), q_power_matrix(qp, T)
    bS, bT = q_bracket_matrix(S, qp), q_bracket_matrix(T, qp)
    eye = np.eye(len(S), dtype=complex)
    return BilateralCoefficients.from_mapping({
        2: lambda z: z * qT,
        3: lambda z: -z * qS,
        4: _const(bT),
        7: _const(-bS),
        8: _const(eye),
    }, len(S), qp.q)


def kummer_shifted_residual(S, T, qp, z, U: Callable):
    """The Kummer equation in pure-shift form.

    U(q^2 z) q^(T-I) - [I + q^S (q-1) z] U(qz) - U(qz) q^(T-I) + [1 + (q-1) z] U(z).
    This equals (1-q)^2 z times the derivative-form left-hand side.
    """
    qp = as_qparam(qp)
    q = qp.q
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    eye = np.eye(len(S))
    qS = q_power_matrix(qp, S)
    qT1 = q_power_matrix(qp, T - eye)
    u0, u1, u2 = U(z), U(q * z), U(q * q * z)
    return (u2 @ qT1 - (eye + (q - 1) * z * qS) @ u1 - u1 @ qT1
            + (1 + (q - 1) * z) * u0)


def infinity_transform(S, T, qp):
    """Kummer equation rewritten in u = 1/z with base s = 1/q.

    Returns ``(coeffs, s)`` where the bundle is
    phi1 = u^3 I, phi3 = u s^(T-S-3I) - u^2 [T-2I]_s, phi7 = s^(T-3I) [-S]_s, phi8 = I.
    Needs ST = TS.
    """
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    require_commuting(S, T, "S and T")
    eye = np.eye(len(S), dtype=complex)
    s = 1 / qp.q
    ln_s = -qp.ln_q

    def s_pow(M):
        return scipy.linalg.expm(M * ln_s)

    def s_bracket(M):
        return (eye - s_pow(M)) / (1 - s)

    a = s_pow(T - S - 3 * eye)
    b = s_bracket(T - 2 * eye)
    c = s_pow(T - 3 * eye) @ s_bracket(-S)
    coeffs = BilateralCoefficients.from_mapping({
        1: lambda u: u**3 * eye,
        3: lambda u: u * a - u * u * b,
        7: _const(c),
        8: _const(eye),
    }, len(S), s)
    return coeffs, s


def gauss_coeffs_bilateral(P, Q, R, qp) -> BilateralCoefficients:
    """Coefficients of the bilateral q-Gauss equation, right-multiplied by q^-Q.

    phi1 = -z^2 q^(P+I), phi2 = z q^R q^-Q, phi3 = -z [P]_q, phi4 = [R]_q q^-Q,
    phi5 = -z q^P, phi6 = [Q+I]_q q^-Q, phi7 = -[P]_q, phi8 = [Q]_q q^-Q.
    Since q^-Q is invertible the residual vanishes exactly when the
    original equation does.
    """
    qp = as_qparam(qp)
    P, Q, R = as_matrix(P, "P"), as_matrix(Q, "Q"), as_matrix(R, "R")
    eye = np.eye(len(P))
    qmQ = q_power_matrix(qp, -Q)
    qP1 = q_power_matrix(qp, P + eye)
    qRQ = q_power_matrix(qp, R) @ qmQ
    qP = q_power_matrix(qp, P)
    bP = q_bracket_matrix(P, qp)
    f4 = q_bracket_matrix(R, qp) @ qmQ
    f6 = q_bracket_matrix(Q + eye, qp) @ qmQ
    f8 = q_bracket_matrix(Q, qp) @ qmQ
    return BilateralCoefficients.from_mapping({
        1: lambda z: -z * z * qP1,
        2: lambda z: z * qRQ,
        3: lambda z: -z * bP,
        4: _const(f4),
        5: lambda z: -z * qP,
        6: _const(f6),
        7: _const(-bP),
        8: _const(f8),
    }, len(P), qp.q)


def hypergeometric_operator_residual(Ps, Qs, qp, z, U: Callable):
    """Apply the r-phi-s difference operator to U at z.

    [delta (q^(Q1-I) delta + [Q1-I]_q) ... (q^(Qs-I) delta + [Qs-I]_q)
     - z (q^P1 delta + [P1]_q) ... (q^Pr delta + [Pr]_q)] U

    with delta U(z) = z D_q U(z).  Each factor acts by left multiplication;
    the rightmost factor is applied first.
    """
    qp = as_qparam(qp)
    q = qp.q
    Ps = [as_matrix(P, "P") for P in Ps]
    Qs = [as_matrix(Q, "Q") for Q in Qs]
    mats = Ps + Qs
    if not mats:
        raise ValueError("at least one parameter matrix is required")
    eye = np.eye(len(mats[0]))

    def delta(F):
        return lambda w: (F(w) - F(q * w)) / qp.one_minus_q

    def affine(A, F):
        qA, bA = q_power_matrix(qp, A), q_bracket_matrix(A, qp)
        dF = delta(F)
        return lambda w: qA @ dF(w) + bA @ F(w)

    lower = U
    for Q in reversed(Qs):
        lower = affine(Q - eye, lower)
    lower = delta(lower)
    upper = U
    for P in reversed(Ps):
        upper = affine(P, upper)
    return lower(z) - z * upper(z)


@dataclass
class PointClassification:
    """Verdict for a point of a bilateral equation.

    ``kind`` is one of ordinary, singular-regular, singular-irregular,
    singular-undetermined.  ``probes`` holds the norm traces of the limit
    sequences that decided a singular verdict.
    """

    kind: str
    witness: str
    probes: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def is_singular(self):
        return self.kind.startswith("singular")


def _operator_matrices(coeffs, z):
    # vec(A X B) = (B^T kron A) vec(X) for column-major vec
    c = lambda i: coeffs(i, z)  # noqa: E731
    eye = np.eye(coeffs.p)
    lead = np.kron(eye, c(1)) + np.kron(c(2).T, eye)
    first = np.kron(eye, c(3)) + np.kron(c(4).T, eye) + np.kron(c(6).T, c(5))
    zeroth = np.kron(c(8).T, c(7))
    return lead, first, zeroth


def classify_singular_point(coeffs: BilateralCoefficients, z0, r0=1e-2, rho=0.5,
                            steps=20, rtol=1e-6) -> PointClassification:
    """Classify z0 as ordinary or as a regular/irregular singular point.

    The second-order part of a bilateral equation is the Sylvester operator
    L2 X = phi1 X + X phi2; z0 is ordinary when L2(z0) is invertible.  At a
    singular point the limits of (z - z0) L1 L2^-1 and (z - z0)^2 L0 L2^-1,
    with L1 X = phi3 X + X phi4 + phi5 X phi6 and L0 X = phi7 X phi8, are
    probed along z_m = z0 + r0 rho^m.  A sequence whose last steps are Cauchy
    within ``rtol`` converges; one whose norms grow monotonically by at least
    a factor ten over the last ten steps diverges.
    """
    if coeffs.is_zero(1) and coeffs.is_zero(2):
        raise ValueError("phi1 and phi2 are both zero: not a second-order equation")
    lead, _, _ = _operator_matrices(coeffs, z0)
    if not is_singular(lead):
        return PointClassification("ordinary", "phi1 X + X phi2 is invertible at z0")

    names = ("first-order", "zeroth-order")
    traces = {name: [] for name in names}
    values = {name: [] for name in names}
    for m in range(steps):
        h = r0 * rho**m
        z = z0 + h
        lead, first, zeroth = _operator_matrices(coeffs, z)
        # relative test: the leading operator may be tiny but well conditioned
        if np.linalg.cond(lead) > 1e14:
            return PointClassification(
                "singular-undetermined",
                f"leading operator singular along the probe at z = {z}", traces)
        inv = np.linalg.inv(lead)
        for name, v in zip(names, (h * first @ inv, h**2 * zeroth @ inv)):
            values[name].append(v)
            traces[name].append(frobenius(v))

    verdicts = {name: _limit_verdict(values[name], traces[name], rtol) for name in names}
    diverging = [name for name, v in verdicts.items() if v == "diverges"]
    if diverging:
        return PointClassification(
            "singular-irregular",
            f"limit does not exist for the {', '.join(diverging)} ratio", traces)
    if all(v == "converges" for v in verdicts.values()):
        return PointClassification("singular-regular", "all weighted ratio limits exist",
                                   traces)
    return PointClassification("singular-undetermined", "probe inconclusive", traces)


def _limit_verdict(values, norms, rtol, tail=10):
    last = values[-tail:]
    steps = [frobenius(b - a) for a, b in zip(last[:-1], last[1:])]
    if all(d <= rtol * max(1.0, frobenius(b)) for d, b in zip(steps[-3:], last[-3:])):
        return "converges"
    tail_norms = norms[-tail:]
    increasing = all(b > a for a, b in zip(tail_norms[:-1], tail_norms[1:]))
    if increasing and tail_norms[-1] >= 10 * tail_norms[0]:
        return "diverges"
    return "undetermined"


def _check_integral_hypotheses(S, T):
    require_commuting(S, T, "S and T")
    for name, M in (("S", S), ("T", T), ("T - S", T - S)):
        info = spectral_info(M)
        if not info.positive_stable:
            raise NotPositiveStable(f"{name} is not positive stable (beta = {info.beta:.3g})")


def _check_ray_point(z, allow_complex):
    z = complex(z)
    if z == 0:
        raise DivisionByZero("z must be nonzero")
    if not allow_complex and not (z.imag == 0 and z.real > 0):
        raise ValueError("integral solutions are restricted to z > 0; "
                         "pass allow_complex=True to override")
    return z


class _U1Weight:
    # F(u) = u^(S-I) ([(1-q)qz - q] u; q)_inf ([(1-q)qz I - q^(T-S)] u; q)_inf^-1
    def __init__(self, S, T, qp, z, policy):
        self.qp, self.z, self.policy = qp, z, policy
        self.eye = np.eye(len(S))
        self.shift = S - self.eye
        self.scalar_arg = qp.one_minus_q * qp.q * z - qp.q
        self.matrix_arg = qp.one_minus_q * qp.q * z * self.eye - q_power_matrix(qp, T - S)

    def __call__(self, u):
        scalar = q_pochhammer_inf(self.scalar_arg * u, self.qp, self.policy).value
        denom = matrix_q_pochhammer_inf(self.matrix_arg * u, self.qp, self.policy).value
        if is_singular(denom):
            raise SingularFactor(0, f"matrix infinite product is singular at u = {u}")
        return scalar * np.linalg.solve(denom.T, z_power_matrix(u, self.shift).T).T


class _U2Weight:
    # f(u) = u^(S-I) (-u; q)_inf (-q^(T-S-I) u; q)_inf^-1
    def __init__(self, S, T, qp, policy):
        self.qp, self.policy = qp, policy
        self.eye = np.eye(len(S))
        self.shift = S - self.eye
        self.matrix_arg = -q_power_matrix(qp, T - S - self.eye)

    def __call__(self, u):
        scalar = q_pochhammer_inf(-u, self.qp, self.policy).value
        denom = matrix_q_pochhammer_inf(self.matrix_arg * u, self.qp, self.policy).value
        if is_singular(denom):
            raise SingularFactor(0, f"matrix infinite product is singular at u = {u}")
        return scalar * np.linalg.solve(denom.T, z_power_matrix(u, self.shift).T).T


def u1_weight(S, T, qp, z, u, policy=None):
    """Weight F(u) of the first integral solution (needs ST = TS)."""
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    require_commuting(S, T, "S and T")
    return _U1Weight(S, T, qp, z, policy or DEFAULT_POLICY)(u)


def u2_weight(S, T, qp, u, policy=None):
    """Weight f(u) = u^(S-I) (-u; q)_inf (-q^(T-S-I) u; q)_inf^-1 (needs ST = TS)."""
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    require_commuting(S, T, "S and T")
    return _U2Weight(S, T, qp, policy or DEFAULT_POLICY)(u)


def u1_weight_recurrence_residual(S, T, qp, z, u, weight: Optional[Callable] = None):
    """{1 + [q - (1-q)qz] u} F(qu) - q^(S-I) {1 - (1-q)qzu} F(u) - u F(u) q^(T-I).

    ``weight`` defaults to :func:`u1_weight`; pass another handle to test it.
    """
    qp = as_qparam(qp)
    q = qp.q
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    eye = np.eye(len(S))
    if weight is None:
        weight = lambda v: u1_weight(S, T, qp, z, v)  # noqa: E731
    Fu, Fqu = weight(u), weight(q * u)
    a = 1 + (q - qp.one_minus_q * q * z) * u
    b = 1 - qp.one_minus_q * q * z * u
    return (a * Fqu - b * q_power_matrix(qp, S - eye) @ Fu
            - u * Fu @ q_power_matrix(qp, T - eye))


def u2_weight_recurrence_residual(S, T, qp, u, weight: Optional[Callable] = None):
    """(1 + u) f(qu) - (q^(S-I) + q^(T-2I) u) f(u).

    ``weight`` defaults to :func:`u2_weight`.
    """
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    eye = np.eye(len(S))
    if weight is None:
        weight = lambda v: u2_weight(S, T, qp, v)  # noqa: E731
    fu, fqu = weight(u), weight(qp.q * u)
    coef = q_power_matrix(qp, S - eye) + u * q_power_matrix(qp, T - 2 * eye)
    return (1 + u) * fqu - coef @ fu


def integral_solution_u1(S, T, qp, z, policy: Optional[TruncationPolicy] = None,
                         n_terms: Optional[int] = 300, allow_complex=False) -> SeriesResult:
    """First integral solution of the Kummer equation, normalised to U1(0) = I.

    U1(z) = C int_0^1 t^(S-I) (tq; q)_inf (t q^(T-S); q)_inf^-1 e_q^(zt) d_q t
    with C = Gamma_q(T) Gamma_q(S)^-1 Gamma_q(T-S)^-1 and
    e_q^(zt) = 1 / ((1-q) z t; q)_inf.  Expanding e_q^(zt) and integrating
    term by term with the q-Beta integral reproduces the series solution, so
    the two agree wherever |(1-q) z| < 1.  S, T and T - S must be positive
    stable and S, T must commute.  ``n_terms=None`` switches to adaptive
    truncation under ``policy``.
    """
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    _check_integral_hypotheses(S, T)
    z = _check_ray_point(z, allow_complex)
    eye = np.eye(len(S))
    qTS = q_power_matrix(qp, T - S)
    shift = S - eye

    def integrand(t):
        scalar = q_pochhammer_inf(t * qp.q, qp, policy).value
        kernel = q_exp_e_neg(-z * t, qp, policy).value
        denom = matrix_q_pochhammer_inf(t * qTS, qp, policy).value
        if is_singular(denom):
            raise SingularFactor(0, f"matrix infinite product is singular at t = {t}")
        return scalar * kernel * np.linalg.solve(denom, z_power_matrix(t, shift))

    body = jackson_integral_finite(integrand, 1.0, qp, policy, n_terms=n_terms)
    cfg = GammaEvalConfig(policy)
    gS = q_gamma_matrix(S, qp, cfg).value
    gTS = q_gamma_matrix(T - S, qp, cfg).value
    gT = q_gamma_matrix(T, qp, cfg).value
    const = gT @ np.linalg.inv(gS @ gTS)
    return SeriesResult(const @ body.value, body.terms_used,
                        body.tail_estimate * frobenius(const))


def exponential_kernel_u1(S, T, qp, z, policy: Optional[TruncationPolicy] = None,
                          n_terms: Optional[int] = 300, allow_complex=False) -> SeriesResult:
    """Jackson sum int_0^c E_q(-qzu) F(qu) d_q u with c = 1 / ((1-q) q^2 z).

    E_q(-qzu) = ((1-q) qzu; q)_inf and F is :func:`u1_weight`.  F satisfies
    its first-order recurrence for every commuting S, T, but because F
    depends on z the sum solves the Kummer equation only when T = S + I.
    There F reduces to u^(S-I) and the sum is a constant multiple of z^(-S).
    Kept so that both facts can be checked.
    """
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    _check_integral_hypotheses(S, T)
    z = _check_ray_point(z, allow_complex)
    weight = _U1Weight(S, T, qp, z, policy)
    zero = np.zeros_like(S)
    c = 1 / (qp.one_minus_q * qp.q**2 * z)

    def terms():
        u = complex(c)
        while True:
            e = q_exp_E(-qp.q * z * u, qp, policy).value
            yield zero if e == 0 else qp.one_minus_q * u * e * weight(qp.q * u)
            u *= qp.q

    # the exponential factor vanishes at the first two nodes
    return accumulate(terms(), policy, n_terms=n_terms, min_terms=3, patience=3)


def integral_solution_u2(S, T, qp, z, j_neg=30, j_pos=60,
                         policy: Optional[TruncationPolicy] = None,
                         allow_complex=False) -> SeriesResult:
    """Second integral solution of the Kummer equation.

    U2(z) = int_0^inf e_q^(-zu) f(qu) d_q u
          = q^(S-I) int_0^inf u^(S-I) e_q^(-zu) (-qu; q)_inf (-q^(T-S) u; q)_inf^-1 d_q u

    summed over the bilateral window -j_neg <= j <= j_pos.  The default
    policy accepts boundary terms up to 1e-8 relative to the sum.
    """
    qp = as_qparam(qp)
    if not qp.is_real:
        raise ValueError("the bilateral Jackson sum is only supported for real q")
    policy = policy or TruncationPolicy(rel_tol=1e-8)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    _check_integral_hypotheses(S, T)
    z = _check_ray_point(z, allow_complex)
    weight = _U2Weight(S, T, qp, DEFAULT_POLICY)

    def integrand(u):
        return q_exp_e_neg(z * u, qp, DEFAULT_POLICY).value * weight(qp.q * u)

    return jackson_integral_infinite(integrand, qp, j_neg, j_pos, policy)
