"""Basic hypergeometric matrix series.

Every term keeps the factor order

    (q^P1; q)_n ... (q^Pr; q)_n (q^Q1; q)_n^-1 ... (q^Qs; q)_n^-1 x^n / (q; q)_n

with numerator products on the left and denominator inverses on the right.
For non-commuting parameters this order is part of the definition.
"""
import warnings
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import NotCommuting
from .qcore import (
    SeriesResult,
    TruncationPolicy,
    QParameter,
    accumulate,
    as_qparam,
    q_number,
)
from .qmatrix import (
    as_matrix,
    frobenius,
    q_bracket_matrix,
    q_power_matrix,
    require_commuting,
    solve_factor,
    z_power_matrix,
)

DEGENERATE_TOL = 1e-12


@dataclass
class HypergeometricSpec:
    """Parameters of r-phi-s: numerator matrices P1..Pr, denominators Q1..Qs.

    ``dim`` is only needed when both lists are empty.
    """

    numerators: List[np.ndarray]
    denominators: List[np.ndarray]
    qp: QParameter
    dim: Optional[int] = None

    def __post_init__(self):
        self.qp = as_qparam(self.qp)
        self.numerators = [as_matrix(P, "numerator") for P in self.numerators]
        self.denominators = [as_matrix(Q, "denominator") for Q in self.denominators]
        dims = {len(M) for M in self.numerators + self.denominators}
        if self.dim is not None:
            dims.add(self.dim)
        if len(dims) != 1:
            raise ValueError("parameter matrices must share one dimension "
                             "(pass dim when both lists are empty)")
        self.dim = dims.pop()

    @property
    def scaling_exponent(self):
        return 1 + len(self.denominators) - len(self.numerators)


@dataclass
class SeriesCoefficients:
    coeffs: List[np.ndarray]

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]


@dataclass
class FundamentalPair:
    """Two solutions of a second-order equation.

    A member whose commutativity precondition fails is ``None`` and the
    corresponding ``*_error`` holds the NotCommuting instance.  ``degenerate``
    is set when the second solution coincides with the first (exponent
    I - T or I - R vanishes).
    """

    first: Optional[SeriesResult]
    second: Optional[SeriesResult]
    first_error: Optional[NotCommuting] = None
    second_error: Optional[NotCommuting] = None
    degenerate: bool = False


def _phi_terms(nums, dens, qp, x, p):
    eye = np.eye(p)
    q_nums = [q_power_matrix(qp, P) for P in nums]
    q_dens = [q_power_matrix(qp, Q) for Q in dens]
    num_prod = [eye.astype(complex) for _ in nums]
    den_inv = [eye.astype(complex) for _ in dens]
    scalar = 1 + 0j
    qn = 1 + 0j
    n = 0
    while True:
        term = eye.astype(complex)
        for A in num_prod:
            term = term @ A
        for B in den_inv:
            term = term @ B
        yield term * scalar
        for i, qP in enumerate(q_nums):
            num_prod[i] = num_prod[i] @ (eye - qn * qP)
        for i, qQ in enumerate(q_dens):
            den_inv[i] = solve_factor(eye - qn * qQ, den_inv[i], n, side="right")
        scalar *= x / (1 - qn * qp.q)
        qn *= qp.q
        n += 1


def _phi(nums, dens, qp, x, p, policy, n_terms):
    if len(nums) == len(dens) + 1 and abs(x) >= 1:
        warnings.warn(f"series argument |x| = {abs(x):.3g} is outside the "
                      "convergence disc", RuntimeWarning, stacklevel=3)
    return accumulate(_phi_terms(nums, dens, qp, x, p), policy,
                      n_terms=n_terms, stop_on_zero=True)


def rphis_matrix(spec: HypergeometricSpec, z, policy: Optional[TruncationPolicy] = None,
                 n_terms=None) -> SeriesResult:
    """r-phi-s evaluated at (1 - q)^(1+s-r) z.

    Terms are (q^P1;q)_n ... (q^Qs;q)_n^-1 (1-q)^(n(1+s-r)) z^n / (q;q)_n.
    """
    qp = spec.qp
    x = qp.one_minus_q ** spec.scaling_exponent * z
    return _phi(spec.numerators, spec.denominators, qp, x, spec.dim, policy, n_terms)


def kummer_1phi1(S, T, qp, z, policy=None, n_terms=None) -> SeriesResult:
    """1-phi-1(q^S; q^T; q; z) = sum (q^S;q)_n (q^T;q)_n^-1 z^n / (q;q)_n.

    S and T need not commute.
    """
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    return _phi([S], [T], qp, z, len(S), policy, n_terms)


def kummer_coefficients(S, T, qp, N) -> SeriesCoefficients:
    """U_0 = I, U_{n+1} = [S+nI]_q U_n [T+nI]_q^-1 / [n+1]_q for n < N."""
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    eye = np.eye(len(S))
    U = eye.astype(complex)
    out = [U]
    for n in range(N):
        left = q_bracket_matrix(S + n * eye, qp)
        right = q_bracket_matrix(T + n * eye, qp)
        U = solve_factor(right, left @ U, n, side="right") / q_number(n + 1, qp)
        out.append(U)
    return SeriesCoefficients(out)


def kummer_solution_u1(S, T, qp, z, policy=None, n_terms=None) -> SeriesResult:
    """U1(z) = 1-phi-1(q^S; q^T; q; (1-q) z), the solution with U1(0) = I."""
    qp = as_qparam(qp)
    return kummer_1phi1(S, T, qp, qp.one_minus_q * z, policy, n_terms)


def kummer_solution_u2(S, T, qp, z, policy=None, n_terms=None) -> SeriesResult:
    """U2(z) = z^(I-T) 1-phi-1(q^(S+I-T); q^(2I-T); q; (1-q) z), for ST = TS."""
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    require_commuting(S, T, "S and T")
    eye = np.eye(len(S))
    prefactor = z_power_matrix(z, eye - T)
    inner = kummer_1phi1(S + eye - T, 2 * eye - T, qp, qp.one_minus_q * z, policy, n_terms)
    return SeriesResult(prefactor @ inner.value, inner.terms_used,
                        inner.tail_estimate * frobenius(prefactor))


def kummer_fundamental_pair(S, T, qp, z, policy=None, n_terms=None) -> FundamentalPair:
    """U1 always; U2 only when S and T commute (otherwise ``second_error``)."""
    T = as_matrix(T, "T")
    first = kummer_solution_u1(S, T, qp, z, policy, n_terms)
    try:
        second = kummer_solution_u2(S, T, qp, z, policy, n_terms)
        error = None
    except NotCommuting as exc:
        second, error = None, exc
    degenerate = frobenius(np.eye(len(T)) - T) <= DEGENERATE_TOL
    return FundamentalPair(first, second, second_error=error, degenerate=degenerate)


def gauss_2phi1(P, Q, R, qp, z, policy=None, n_terms=None) -> SeriesResult:
    """2-phi-1(q^P, q^Q; q^R; q; z) with factor order (q^P)_n (q^Q)_n (q^R)_n^-1."""
    qp = as_qparam(qp)
    P, Q, R = as_matrix(P, "P"), as_matrix(Q, "Q"), as_matrix(R, "R")
    return _phi([P, Q], [R], qp, z, len(P), policy, n_terms)


def gauss_solution_w2(P, Q, R, qp, z, policy=None, n_terms=None) -> SeriesResult:
    """W2(z) = z^(I-R) 2-phi-1(q^(P+I-R), q^(Q+I-R); q^(2I-R); q; z)."""
    qp = as_qparam(qp)
    P, Q, R = as_matrix(P, "P"), as_matrix(Q, "Q"), as_matrix(R, "R")
    require_commuting(P, R, "P and R")
    require_commuting(Q, R, "Q and R")
    eye = np.eye(len(P))
    prefactor = z_power_matrix(z, eye - R)
    inner = gauss_2phi1(P + eye - R, Q + eye - R, 2 * eye - R, qp, z, policy, n_terms)
    return SeriesResult(prefactor @ inner.value, inner.terms_used,
                        inner.tail_estimate * frobenius(prefactor))


def gauss_fundamental_pair(P, Q, R, qp, z, policy=None, n_terms=None) -> FundamentalPair:
    """W1 needs QR = RQ; W2 additionally needs PR = RP."""
    P, Q, R = as_matrix(P, "P"), as_matrix(Q, "Q"), as_matrix(R, "R")
    first = second = first_error = second_error = None
    try:
        require_commuting(Q, R, "Q and R")
        first = gauss_2phi1(P, Q, R, qp, z, policy, n_terms)
    except NotCommuting as exc:
        first_error = exc
    try:
        second = gauss_solution_w2(P, Q, R, qp, z, policy, n_terms)
    except NotCommuting as exc:
        second_error = exc
    degenerate = frobenius(np.eye(len(R)) - R) <= DEGENERATE_TOL
    return FundamentalPair(first, second, first_error, second_error, degenerate)


def convergence_probe(S, T, qp, z, n_terms=40, window=10):
    """Empirical term ratio of 1-phi-1(q^S; q^T; q; z).

    Returns the geometric mean of ||t_{n+1}|| / ||t_n|| over the last
    ``window`` terms; the ratio test says this tends to |z|.
    """
    if n_terms < 15:
        raise ValueError("the probe needs at least 15 terms")
    qp = as_qparam(qp)
    S, T = as_matrix(S, "S"), as_matrix(T, "T")
    if z == 0:
        return 0.0
    norms = []
    for t in _phi_terms([S], [T], qp, z, len(S)):
        norms.append(frobenius(t))
        if len(norms) == n_terms:
            break
    first, last = norms[-window - 1], norms[-1]
    if first == 0 or last == 0:
        return 0.0
    return float((last / first) ** (1.0 / window))
