"""Dense complex matrix layer.

Matrices are plain ``numpy`` complex arrays; :func:`as_matrix` validates and
normalises input.  Matrix exponentials go through :func:`scipy.linalg.expm`;
the principal logarithm uses an eigendecomposition when the eigenvector
basis is well conditioned and falls back to scipy's Schur-based ``logm``.
"""
import cmath
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BranchCutViolation,
    DivisionByZero,
    EigenFailure,
    NotCommuting,
    SingularFactor,
    SingularMatrix,
    TruncationNotConverged,
)
from .qcore import DEFAULT_POLICY, SeriesResult, as_qparam

MAX_DIM = 64
EIG_COND_LIMIT = 1e8
SIGMA_TOL = 1e-10
COMMUTE_RTOL = 1e-12


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite square complex128 array (scalars become 1x1)."""
    A = np.array(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] == 0 or A.shape[0] > MAX_DIM:
        raise ValueError(f"{name} dimension must be in 1..{MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def frobenius(M):
    return float(np.linalg.norm(M))


def commutator_norm(A, B):
    return frobenius(A @ B - B @ A)


def commutes(A, B, rtol=COMMUTE_RTOL):
    """||AB - BA||_F <= rtol ||A||_F ||B||_F."""
    return commutator_norm(A, B) <= rtol * frobenius(A) * frobenius(B)


def require_commuting(A, B, names="matrices"):
    if not commutes(A, B):
        raise NotCommuting(f"{names} do not commute "
                           f"(||AB - BA||_F = {commutator_norm(A, B):.3e})")


@dataclass(frozen=True)
class SpectralInfo:
    eigenvalues: np.ndarray
    alpha: float
    beta: float

    @property
    def positive_stable(self):
        return self.beta > 0


def _eigvals(M):
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def spectral_info(M) -> SpectralInfo:
    """Eigenvalues with the largest (alpha) and smallest (beta) real parts."""
    ev = _eigvals(as_matrix(M))
    return SpectralInfo(ev, float(ev.real.max()), float(ev.real.min()))


def _check_principal(ev, what):
    if np.any(np.abs(ev) == 0):
        raise SingularMatrix(f"{what} is singular")
    on_cut = (np.abs(ev.imag) <= 1e-14 * np.abs(ev)) & (ev.real < 0)
    if np.any(on_cut):
        raise BranchCutViolation(f"{what} has an eigenvalue on the negative real axis")


def mat_log_principal(M):
    """Principal matrix logarithm: exp(L) = M, eigenvalues of L in |Im| < pi."""
    A = as_matrix(M)
    ev, V = np.linalg.eig(A)
    _check_principal(ev, "matrix")
    if np.linalg.cond(V) < EIG_COND_LIMIT:
        return V @ np.diag(np.log(ev)) @ np.linalg.inv(V)
    return scipy.linalg.logm(A)


def _principal_log(z, what="z"):
    z = complex(z)
    if z == 0:
        raise DivisionByZero(f"{what} must be nonzero")
    if z.imag == 0 and z.real < 0:
        raise BranchCutViolation(f"{what} = {z} lies on the negative real axis")
    return cmath.log(z)


def q_power_matrix(qp, P):
    """q^P = exp(P ln q)."""
    qp = as_qparam(qp)
    return scipy.linalg.expm(as_matrix(P) * qp.ln_q)


def z_power_matrix(z, M):
    """z^M = exp(M ln z) on the principal branch."""
    return scipy.linalg.expm(as_matrix(M) * _principal_log(z))


def q_bracket_matrix(P, qp):
    """[P]_q = (I - q^P) / (1 - q)."""
    qp = as_qparam(qp)
    P = as_matrix(P)
    return (np.eye(len(P)) - q_power_matrix(qp, P)) / qp.one_minus_q


def _pochhammer_factors(qP, q, n):
    eye = np.eye(len(qP))
    qk = 1 + 0j
    for _ in range(n):
        yield eye - qk * qP
        qk *= q


def matrix_q_pochhammer(P, qp, n):
    """(q^P; q)_n = (I - q^P)(I - q^(P+I)) ... (I - q^(P+(n-1)I))."""
    qp = as_qparam(qp)
    P = as_matrix(P)
    if n < 0:
        raise ValueError("n must be non-negative")
    out = np.eye(len(P), dtype=complex)
    for F in _pochhammer_factors(q_power_matrix(qp, P), qp.q, n):
        out = out @ F
    return out


def is_singular(F, tol=SIGMA_TOL):
    s = np.linalg.svd(F, compute_uv=False)
    return s[-1] <= tol * max(1.0, s[0])


def solve_factor(F, B, k, side="left"):
    """F^-1 B (side='left') or B F^-1 (side='right'); SingularFactor(k) if F is singular."""
    if is_singular(F):
        raise SingularFactor(k)
    if side == "left":
        return np.linalg.solve(F, B)
    return np.linalg.solve(F.T, B.T).T


def matrix_q_pochhammer_inv(P, qp, n):
    """Inverse of (q^P; q)_n, one linear solve per factor."""
    qp = as_qparam(qp)
    P = as_matrix(P)
    if n < 0:
        raise ValueError("n must be non-negative")
    out = np.eye(len(P), dtype=complex)
    for k, F in enumerate(_pochhammer_factors(q_power_matrix(qp, P), qp.q, n)):
        out = solve_factor(F, out, k)
    return out


def matrix_q_pochhammer_inf(M, qp, policy=None) -> SeriesResult:
    """(M; q)_inf = prod_{k>=0} (I - M q^k) for an arbitrary square M.

    Stops once ||M||_F |q|^k < rel_tol.
    """
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    M = as_matrix(M)
    eye = np.eye(len(M))
    out = eye.astype(complex)
    scale = frobenius(M)
    Mk = M.copy()
    for k in range(policy.max_terms):
        if scale * abs(qp.q) ** k < policy.rel_tol:
            return SeriesResult(out, k, scale * abs(qp.q) ** k)
        out = out @ (eye - Mk)
        Mk = Mk * qp.q
    raise TruncationNotConverged(
        f"matrix infinite product not converged after {policy.max_terms} factors")


def check_q_sigma_condition(T, qp, k_max, tol=SIGMA_TOL):
    """True iff no eigenvalue mu of q^T satisfies mu = q^-k for 0 <= k <= k_max.

    Tested as |1 - q^k mu| > tol, which is the invertibility of every factor
    I - q^(T+kI) that a series truncated at k_max + 1 terms touches.
    """
    qp = as_qparam(qp)
    mu = _eigvals(q_power_matrix(qp, T))
    qk = 1 + 0j
    for _ in range(k_max + 1):
        if np.any(np.abs(1 - qk * mu) <= tol):
            return False
        qk *= qp.q
    return True
