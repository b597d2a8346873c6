"""Scalar q-calculus kernel.

q-numbers, q-Pochhammer symbols, the two q-exponentials, q-derivatives and
Jackson q-integrals.  Function handles passed to the derivative and integral
routines may return scalars or numpy arrays; the arithmetic is the same.

All complex powers use the principal logarithm, so a base ``q`` on the
negative real axis is rejected.
"""
import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

import numpy as np

from .errors import (
    BranchCutViolation,
    DivisionByZero,
    PoleEncountered,
    TruncationNotConverged,
)


@dataclass(frozen=True)
class QParameter:
    """The base ``q`` with the derived quantities every routine needs."""

    q: complex
    one_minus_q: complex = field(init=False)
    ln_q: complex = field(init=False)

    def __post_init__(self):
        q = complex(self.q)
        if not cmath.isfinite(q):
            raise ValueError("q must be finite")
        if q == 0:
            raise ValueError("q must be nonzero")
        if abs(q) >= 1:
            raise ValueError(f"|q| must be < 1, got |q| = {abs(q)}")
        if q.imag == 0 and q.real < 0:
            raise BranchCutViolation("q lies on the branch cut of the principal logarithm")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "one_minus_q", 1 - q)
        object.__setattr__(self, "ln_q", cmath.log(q))

    @property
    def is_real(self):
        return self.q.imag == 0

    def power(self, lam):
        """q**lam on the principal branch."""
        return cmath.exp(lam * self.ln_q)


def as_qparam(q):
    return q if isinstance(q, QParameter) else QParameter(q)


@dataclass(frozen=True)
class TruncationPolicy:
    rel_tol: float = 1e-14
    abs_tol: float = 1e-300
    max_terms: int = 10000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be non-negative")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError("max_terms must be a positive integer")


DEFAULT_POLICY = TruncationPolicy()


@dataclass
class SeriesResult:
    """Value of a truncated series, product or Jackson sum.

    ``tail_estimate`` is the norm of the last accepted term (or factor
    deviation from one for products).  ``aux`` carries secondary values such
    as a cross-check route.
    """

    value: Any
    terms_used: int
    tail_estimate: float
    aux: dict = field(default_factory=dict)


@dataclass
class ResidualReport:
    """Residual norms of an identity or equation at a list of sample points."""

    points: list
    max_residual: float
    tolerance_used: Optional[float] = None
    note: str = ""

    @classmethod
    def from_points(cls, points, tolerance_used=None, note=""):
        points = [(p, float(r)) for p, r in points]
        worst = max((r for _, r in points), default=0.0)
        return cls(points, worst, tolerance_used, note)

    @property
    def passed(self):
        return self.tolerance_used is None or self.max_residual <= self.tolerance_used


def value_norm(x):
    """Frobenius norm for arrays, modulus for scalars."""
    if isinstance(x, np.ndarray):
        return float(np.linalg.norm(x))
    return abs(x)


def accumulate(terms: Iterable, policy: Optional[TruncationPolicy] = None,
               n_terms: Optional[int] = None, min_terms=1, patience=2,
               stop_on_zero=False) -> SeriesResult:
    """Sum an iterable of terms under a truncation policy.

    With ``n_terms`` given exactly that many terms are summed and no
    convergence test is made.  Otherwise summation stops once ``patience``
    consecutive terms satisfy ``|t| < rel_tol * |sum| + abs_tol``.
    ``stop_on_zero`` ends the sum at the first exactly-zero term, which is
    right for series whose terms are built multiplicatively.
    """
    policy = policy or DEFAULT_POLICY
    limit = n_terms if n_terms is not None else policy.max_terms
    total = None
    used = 0
    tail = 0.0
    small = 0
    finished = n_terms is not None
    for t in terms:
        if used >= limit:
            break
        tn = value_norm(t)
        if stop_on_zero and tn == 0 and used > 0:
            finished = True
            break
        total = t if total is None else total + t
        used += 1
        tail = tn
        if n_terms is not None:
            continue
        if tn < policy.rel_tol * value_norm(total) + policy.abs_tol:
            small += 1
        else:
            small = 0
        if used >= min_terms and small >= patience:
            finished = True
            break
    else:
        finished = True
    if total is None:
        raise ValueError("no terms to sum")
    if not finished:
        raise TruncationNotConverged(
            f"tolerance not reached after {used} terms (last term norm {tail:.3e})")
    return SeriesResult(total, used, tail)


def q_number(lam, qp):
    """[lam]_q = (1 - q**lam) / (1 - q)."""
    qp = as_qparam(qp)
    return (1 - qp.power(lam)) / qp.one_minus_q


def q_pochhammer(a, qp, n):
    """Finite q-shifted factorial (a; q)_n."""
    qp = as_qparam(qp)
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1 + 0j
    qk = 1 + 0j
    for _ in range(n):
        out *= 1 - a * qk
        qk *= qp.q
    return out


def _pochhammer_inf(a, qp, policy):
    # returns (value, factors used, last |a q^k|, smallest |factor|)
    out = 1 + 0j
    t = complex(a)
    smallest = math.inf
    for k in range(policy.max_terms):
        if abs(t) < policy.rel_tol:
            return out, k, abs(t), smallest
        f = 1 - t
        smallest = min(smallest, abs(f))
        out *= f
        t *= qp.q
    raise TruncationNotConverged(
        f"infinite product not converged after {policy.max_terms} factors")


def q_pochhammer_inf(a, qp, policy=None) -> SeriesResult:
    """(a; q)_inf, truncated once |a q^k| drops below ``policy.rel_tol``."""
    qp = as_qparam(qp)
    value, used, tail, _ = _pochhammer_inf(a, qp, policy or DEFAULT_POLICY)
    return SeriesResult(value, used, tail)


def q_exp_E(z, qp, policy=None, form="product") -> SeriesResult:
    """The q-exponential E_q(z) = (-(1-q) z; q)_inf.

    ``form="series"`` sums sum_j q^(j(j-1)/2) z^j / [j]_q! instead; the two
    agree and the series is kept as a cross-check.
    """
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    if form == "product":
        return q_pochhammer_inf(-qp.one_minus_q * z, qp, policy)
    if form != "series":
        raise ValueError(f"unknown form {form!r}")

    def terms():
        t = 1 + 0j
        qj = 1 + 0j
        j = 0
        while True:
            yield t
            # t_{j+1} / t_j = q^j z / [j+1]_q
            t = t * qj * z * qp.one_minus_q / (1 - qj * qp.q)
            qj *= qp.q
            j += 1

    return accumulate(terms(), policy, stop_on_zero=True)


def q_exp_e_neg(w, qp, policy=None, pole_tol=1e-14) -> SeriesResult:
    """e_q^(-w) = 1 / (-(1-q) w; q)_inf.

    Raises PoleEncountered when a factor of the product vanishes.
    """
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    value, used, tail, smallest = _pochhammer_inf(-qp.one_minus_q * w, qp, policy)
    if smallest < pole_tol:
        raise PoleEncountered(f"e_q^(-w) has a pole at w = {w}")
    return SeriesResult(1 / value, used, tail)


def _difference_quotient(f, z, q):
    if z == 0:
        raise DivisionByZero("the q-derivative is undefined at z = 0")
    return (f(z) - f(q * z)) / ((1 - q) * z)


def q_derivative(f: Callable, z, qp):
    """D_q f(z) = (f(z) - f(qz)) / ((1 - q) z)."""
    qp = as_qparam(qp)
    return _difference_quotient(f, z, qp.q)


def q_derivative2(f: Callable, z, qp):
    """D_q applied twice; samples f at z, qz and q^2 z."""
    qp = as_qparam(qp)
    if z == 0 or qp.q * z == 0:
        raise DivisionByZero("the second q-derivative is undefined at z = 0")
    return _difference_quotient(lambda w: _difference_quotient(f, w, qp.q), z, qp.q)


def q_product_rule(f, g, z, qp, form=1):
    """D_q(fg)(z) assembled from the derivatives of the factors.

    form 1: f(qz) D_q g(z) + D_q f(z) g(z)
    form 2: f(z) D_q g(z) + D_q f(z) g(qz)
    The factor order is kept so matrix-valued f, g also work.
    """
    qp = as_qparam(qp)
    df, dg = q_derivative(f, z, qp), q_derivative(g, z, qp)
    if form == 1:
        return _mul(f(qp.q * z), dg) + _mul(df, g(z))
    if form == 2:
        return _mul(f(z), dg) + _mul(df, g(qp.q * z))
    raise ValueError("form must be 1 or 2")


def _mul(a, b):
    return a @ b if np.ndim(a) == 2 and np.ndim(b) == 2 else a * b


def q_quotient_rule(f, g, z, qp, form=1):
    """D_q(f/g)(z) for scalar f, g, in either of the two standard forms."""
    qp = as_qparam(qp)
    qz = qp.q * z
    df, dg = q_derivative(f, z, qp), q_derivative(g, z, qp)
    denom = g(z) * g(qz)
    if denom == 0:
        raise DivisionByZero("g vanishes at z or qz")
    if form == 1:
        return (g(z) * df - f(z) * dg) / denom
    if form == 2:
        return (g(qz) * df - f(qz) * dg) / denom
    raise ValueError("form must be 1 or 2")


def jackson_integral_finite(g: Callable, c, qp, policy=None, n_terms=None,
                            min_terms=1) -> SeriesResult:
    """int_0^c g(u) d_q u = (1 - q) sum_{j>=0} c q^j g(c q^j)."""
    qp = as_qparam(qp)

    def terms():
        node = complex(c)
        while True:
            yield qp.one_minus_q * node * g(node)
            node *= qp.q

    return accumulate(terms(), policy, n_terms=n_terms, min_terms=min_terms, patience=3)


def jackson_integral_infinite(g: Callable, qp, j_neg, j_pos, policy=None) -> SeriesResult:
    """int_0^inf g(u) d_q u = (1 - q) sum_j q^j g(q^j) over -j_neg <= j <= j_pos.

    The window is not extended automatically: if either boundary term is not
    below tolerance relative to the sum, TruncationNotConverged is raised.
    """
    qp = as_qparam(qp)
    policy = policy or DEFAULT_POLICY
    if j_neg < 1 or j_pos < 1:
        raise ValueError("j_neg and j_pos must be positive")
    total = None
    lo = hi = 0.0
    for j in range(-j_neg, j_pos + 1):
        node = qp.q ** j  # integer power: exact for q = 2^-k
        t = qp.one_minus_q * node * g(node)
        total = t if total is None else total + t
        if j == -j_neg:
            lo = value_norm(t)
        elif j == j_pos:
            hi = value_norm(t)
    tail = max(lo, hi)
    if tail > policy.rel_tol * value_norm(total) + policy.abs_tol:
        raise TruncationNotConverged(
            f"boundary terms ({lo:.3e}, {hi:.3e}) exceed tolerance for window "
            f"[-{j_neg}, {j_pos}]")
    return SeriesResult(total, j_neg + j_pos + 1, tail)


def q_deriv_of_integral_check(g: Callable, a, k, z, qp, policy=None):
    """Both sides of the rule for D_q of int_0^{1/(a z^k)} g(z, u) d_q u.

    Returns ``(lhs, rhs)`` where lhs differentiates the integral directly and
    rhs is the integral of D_{q,z} g minus the k boundary terms picked up
    because the upper limit moves with z.
    """
    qp = as_qparam(qp)
    q = qp.q
    if z == 0:
        raise DivisionByZero("z must be nonzero")
    if k < 1:
        raise ValueError("k must be a positive integer")

    def integral(w):
        return jackson_integral_finite(lambda u: g(w, u), 1 / (a * w**k), qp, policy).value

    lhs = (integral(z) - integral(q * z)) / (qp.one_minus_q * z)
    inner = jackson_integral_finite(
        lambda u: (g(z, u) - g(q * z, u)) / (qp.one_minus_q * z),
        1 / (a * z**k), qp, policy).value
    boundary = sum(
        q ** (j - k) / (a * z ** (k + 1)) * g(q * z, q ** (j - k) / (a * z**k))
        for j in range(k))
    return lhs, inner - boundary


def q_integration_by_parts_check(g: Callable, h: Callable, c, qp, policy=None):
    """Both sides of int_0^c g(qu) d_q h(u) = g(c)h(c) - g(0)h(0) - int_0^c h D_q g d_q u.

    g and h must be defined at 0.
    """
    qp = as_qparam(qp)
    q = qp.q
    lhs = jackson_integral_finite(
        lambda u: g(q * u) * q_derivative(h, u, qp), c, qp, policy).value
    rest = jackson_integral_finite(
        lambda u: h(u) * q_derivative(g, u, qp), c, qp, policy).value
    return lhs, g(c) * h(c) - g(0) * h(0) - rest
