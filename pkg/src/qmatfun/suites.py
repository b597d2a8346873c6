"""Residual suites shared by the command line and the test-suite.

Each suite returns a :class:`ResidualReport` whose points are
``(label, residual)`` pairs with Frobenius (or absolute) residual norms.
"""
import numpy as np

from . import samples
from .qcore import (
    ResidualReport,
    as_qparam,
    q_deriv_of_integral_check,
    q_derivative,
    q_integration_by_parts_check,
    q_pochhammer,
    q_product_rule,
    q_quotient_rule,
)
from .qdiffeq import (
    bilateral_residual,
    gauss_coeffs_bilateral,
    integral_solution_u1,
    integral_solution_u2,
    kummer_coeffs_bilateral,
    u1_weight_recurrence_residual,
    u2_weight_recurrence_residual,
)
from .qmatrix import (
    as_matrix,
    frobenius,
    matrix_q_pochhammer,
    matrix_q_pochhammer_inv,
    q_bracket_matrix,
    require_commuting,
)
from .qseries import (
    gauss_2phi1,
    gauss_solution_w2,
    kummer_coefficients,
    kummer_solution_u1,
    kummer_solution_u2,
)
from .qspecial import (
    q_beta_matrix,
    q_gamma_matrix,
    verify_pochhammer_gamma_identity,
)


def _label(prefix, z):
    z = complex(z)
    return f"{prefix}@{z.real:g}{z.imag:+g}j" if z.imag else f"{prefix}@{z.real:g}"


def _solution_residuals(coeffs, solutions, grid, qp):
    points = []
    for z in grid:
        for name, U in solutions:
            points.append((_label(name, z), frobenius(bilateral_residual(coeffs, U, z, qp))))
    return points


def kummer_series(S, T, qp, grid, policy=None, n_terms=None, tol=None):
    """Residual of U1 = 1phi1(q^S; q^T; q; (1-q)z) in the bilateral Kummer equation."""
    qp = as_qparam(qp)
    U1 = lambda z: kummer_solution_u1(S, T, qp, z, policy, n_terms).value  # noqa: E731
    points = _solution_residuals(kummer_coeffs_bilateral(S, T, qp), [("U1", U1)], grid, qp)
    return ResidualReport.from_points(points, tol)


def kummer_second(S, T, qp, grid, policy=None, n_terms=None, tol=None):
    """Residual of U2 = z^(I-T) 1phi1(...) for commuting S, T."""
    qp = as_qparam(qp)
    require_commuting(as_matrix(S, "S"), as_matrix(T, "T"), "S and T")
    U2 = lambda z: kummer_solution_u2(S, T, qp, z, policy, n_terms).value  # noqa: E731
    points = _solution_residuals(kummer_coeffs_bilateral(S, T, qp), [("U2", U2)], grid, qp)
    return ResidualReport.from_points(points, tol)


def kummer_integrals(S, T, qp, u1_grid, u2_grid, n_terms=300, window=(30, 60), tol=None):
    """Residuals of the two Jackson-integral solutions."""
    qp = as_qparam(qp)
    coeffs = kummer_coeffs_bilateral(S, T, qp)
    U1 = lambda z: integral_solution_u1(S, T, qp, z, n_terms=n_terms).value  # noqa: E731
    U2 = lambda z: integral_solution_u2(S, T, qp, z, *window).value  # noqa: E731
    points = (_solution_residuals(coeffs, [("U1", U1)], u1_grid, qp)
              + _solution_residuals(coeffs, [("U2", U2)], u2_grid, qp))
    return ResidualReport.from_points(points, tol)


def gauss_series(P, Q, R, qp, grid, policy=None, n_terms=None, tol=None):
    """Residuals of W1 and W2 in the bilateral q-Gauss equation."""
    qp = as_qparam(qp)
    W1 = lambda z: gauss_2phi1(P, Q, R, qp, z, policy, n_terms).value  # noqa: E731
    W2 = lambda z: gauss_solution_w2(P, Q, R, qp, z, policy, n_terms).value  # noqa: E731
    coeffs = gauss_coeffs_bilateral(P, Q, R, qp)
    return ResidualReport.from_points(
        _solution_residuals(coeffs, [("W1", W1), ("W2", W2)], grid, qp), tol)


def gamma_beta(P, Q, qp, n_max=4, cfg=None, tol=None):
    """Functional equation, Beta symmetry and routes, Pochhammer-Gamma identity."""
    qp = as_qparam(qp)
    P, Q = as_matrix(P, "P"), as_matrix(Q, "Q")
    eye = np.eye(len(P))
    points = []
    for name, M in (("P", P), ("Q", Q)):
        g = q_gamma_matrix(M, qp, cfg).value
        g1 = q_gamma_matrix(M + eye, qp, cfg).value
        points.append((f"gamma-shift-{name}", frobenius(g1 - q_bracket_matrix(M, qp) @ g)))
    bpq = q_beta_matrix(P, Q, qp, cfg)
    bqp = q_beta_matrix(Q, P, qp, cfg, cross_check=False)
    points.append(("beta-symmetry", frobenius(bpq.value - bqp.value)))
    points.append(("beta-routes", bpq.aux["route_difference"]))
    for n in range(1, n_max + 1):
        report = verify_pochhammer_gamma_identity(P, qp, n, cfg)
        points.append((f"pochhammer-gamma-n{n}", report.max_residual))
    return ResidualReport.from_points(points, tol)


def coefficient_closed_form(S, T, qp, n):
    """U_n = (q^S; q)_n (q^T; q)_n^-1 (1-q)^n / (q; q)_n."""
    qp = as_qparam(qp)
    scale = qp.one_minus_q ** n / q_pochhammer(qp.q, qp, n)
    return matrix_q_pochhammer(S, qp, n) @ matrix_q_pochhammer_inv(T, qp, n) * scale


def recurrences(S, T, qp, z, us, N=40, tol=None):
    """Coefficient recurrence against its closed form, and the two weight recurrences.

    The coefficient check accepts any S, T; the weight checks need ST = TS.
    """
    qp = as_qparam(qp)
    coeffs = kummer_coefficients(S, T, qp, N)
    worst = max(frobenius(coeffs[n] - coefficient_closed_form(S, T, qp, n))
                for n in range(N + 1))
    points = [("coefficients", worst)]
    for u in us:
        points.append((_label("u1-weight", u),
                       frobenius(u1_weight_recurrence_residual(S, T, qp, z, u))))
        points.append((_label("u2-weight", u),
                       frobenius(u2_weight_recurrence_residual(S, T, qp, u))))
    return ResidualReport.from_points(points, tol)


def _rational_pair(rng):
    num = samples.polynomial(rng, 3)
    den = samples.polynomial(rng, 2) * 0.2
    den[0] = 2.0
    f = lambda z: samples.eval_polynomial(num, z)  # noqa: E731
    g = lambda z: samples.eval_polynomial(den, z)  # noqa: E731
    return f, g


def rules(rng, qp, cases=5, tol=None):
    """Product, quotient, integration-by-parts and moving-limit rules on random inputs."""
    qp = as_qparam(qp)
    points = []
    for case in range(cases):
        a, b = samples.polynomial(rng, 3), samples.polynomial(rng, 4)
        f = lambda z, a=a: samples.eval_polynomial(a, z)  # noqa: E731
        g = lambda z, b=b: samples.eval_polynomial(b, z)  # noqa: E731
        z = rng.uniform(0.2, 0.9)
        direct = q_derivative(lambda w: f(w) * g(w), z, qp)
        for form in (1, 2):
            points.append((f"product{form}-{case}",
                           abs(direct - q_product_rule(f, g, z, qp, form))))
        num, den = _rational_pair(rng)
        direct = q_derivative(lambda w: num(w) / den(w), z, qp)
        for form in (1, 2):
            points.append((f"quotient{form}-{case}",
                           abs(direct - q_quotient_rule(num, den, z, qp, form))))
        lhs, rhs = q_integration_by_parts_check(f, g, rng.uniform(0.5, 1.5), qp)
        points.append((f"by-parts-{case}", abs(lhs - rhs)))
        c = samples.polynomial(rng, 2)
        kernel = lambda w, u, c=c: samples.eval_polynomial(c, w) * f(u)  # noqa: E731
        for k in (1, 2):
            lhs, rhs = q_deriv_of_integral_check(kernel, 1.5, k, z + 0.3, qp)
            points.append((f"moving-limit-k{k}-{case}", abs(lhs - rhs)))
    return ResidualReport.from_points(points, tol)
