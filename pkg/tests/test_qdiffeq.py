import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from qmatfun import (
    BilateralCoefficients,
    DivisionByZero,
    HypergeometricSpec,
    NotCommuting,
    NotPositiveStable,
    QParameter,
    bilateral_residual,
    classify_singular_point,
    exponential_kernel_u1,
    gauss_2phi1,
    gauss_coeffs_bilateral,
    gauss_solution_w2,
    hypergeometric_operator_residual,
    infinity_transform,
    integral_solution_u1,
    integral_solution_u2,
    kummer_1phi1,
    kummer_coeffs_bilateral,
    kummer_shifted_residual,
    kummer_solution_u1,
    kummer_solution_u2,
    q_power_matrix,
    rphis_matrix,
    samples,
    u1_weight,
    u1_weight_recurrence_residual,
    u2_weight,
    u2_weight_recurrence_residual,
)
from qmatfun.qcore import q_pochhammer_inf
from qmatfun.qmatrix import matrix_q_pochhammer_inf, z_power_matrix

Q = QParameter(0.5)
I2 = np.eye(2)
S_DIAG, T_DIAG = np.diag([0.5, 1.0]), np.diag([1.5, 1.7])


def norm(M):
    return np.linalg.norm(M)


# ---------------------------------------------------------------- bilateral residual

def test_bilateral_residual_trivial_cases():
    zero = BilateralCoefficients([None] * 8, 2, 0.5)
    U = lambda z: np.array([[z, 1], [z * z, 2]])  # noqa: E731
    assert norm(bilateral_residual(zero, U, 0.7)) == 0
    ident = BilateralCoefficients.from_mapping({7: lambda z: I2, 8: lambda z: I2}, 2, 0.5)
    assert_allclose(bilateral_residual(ident, U, 0.7), U(0.7))
    with pytest.raises(DivisionByZero):
        bilateral_residual(zero, U, 0)
    with pytest.raises(ValueError):
        BilateralCoefficients.from_mapping({9: lambda z: I2}, 2, 0.5)


def test_bilateral_residual_second_derivative_of_square():
    # D^2 z^2 = [2]_q, so phi1 = I gives [2]_q I on U = z^2 I
    coeffs = BilateralCoefficients.from_mapping({1: lambda z: I2}, 2, 0.5)
    got = bilateral_residual(coeffs, lambda z: z * z * I2, 0.9)
    assert_allclose(got, 1.5 * I2, atol=1e-14)


# ---------------------------------------------------------------- Kummer equation

@pytest.mark.parametrize("seed", range(3))
def test_kummer_series_solutions(seed):
    rng = np.random.default_rng(seed)
    S, T = samples.noncommuting_pair(rng, 3)
    coeffs = kummer_coeffs_bilateral(S, T, Q)
    for z in (0.2, 0.6, 0.9, 0.4 + 0.3j):
        U = lambda w: kummer_solution_u1(S, T, Q, w).value  # noqa: E731
        assert norm(bilateral_residual(coeffs, U, z)) < 1e-10


def test_kummer_second_solution_commuting():
    rng = np.random.default_rng(3)
    S, T = samples.commuting_pair(rng, 3)
    coeffs = kummer_coeffs_bilateral(S, T, Q)
    for z in (0.2, 0.7):
        U = lambda w: kummer_solution_u2(S, T, Q, w).value  # noqa: E731
        assert norm(bilateral_residual(coeffs, U, z)) < 1e-9


def test_kummer_scalar_residual_matches_oracle():
    s, t, z = 0.4, 1.3, 0.6
    coeffs = kummer_coeffs_bilateral(np.array([[s]]), np.array([[t]]), Q)
    U = lambda w: np.array([[complex(oracles.kummer_u1(s, t, 0.5, w))]])  # noqa: E731
    assert abs(bilateral_residual(coeffs, U, z)[0, 0]) < 1e-12
    mp_res = oracles.kummer_scalar_residual(lambda w: oracles.kummer_u1(s, t, 0.5, w),
                                            s, t, 0.5, mp.mpf(z))
    assert abs(mp_res) < 1e-25


def test_kummer_non_solution_has_visible_residual():
    coeffs = kummer_coeffs_bilateral(S_DIAG, T_DIAG, Q)
    U = lambda w: kummer_solution_u1(S_DIAG, T_DIAG, Q, w).value @ (I2 + w * np.diag([0.1, 0.2]))  # noqa: E501,E731
    assert norm(bilateral_residual(coeffs, U, 0.5)) > 1e-3


def test_shifted_form_is_scaled_derivative_form():
    rng = np.random.default_rng(4)
    S, T = samples.noncommuting_pair(rng, 2)
    coeffs = kummer_coeffs_bilateral(S, T, Q)
    for _ in range(50):
        A = rng.standard_normal((2, 2))
        B = rng.standard_normal((2, 2))
        U = lambda w: A + w * B + w**3 * A @ B  # noqa: E731
        z = rng.uniform(0.1, 1.5)
        shifted = kummer_shifted_residual(S, T, Q, z, U)
        derivative = bilateral_residual(coeffs, U, z)
        assert norm(shifted - (1 - 0.5)**2 * z * derivative) < 1e-12 * max(1, norm(shifted))


# ---------------------------------------------------------------- point at infinity

def test_infinity_transform_coefficients():
    rng = np.random.default_rng(5)
    S, T = samples.commuting_diagonal_pair(rng, 2)
    coeffs, s = infinity_transform(S, T, Q)
    assert s == 2
    assert_allclose(coeffs(1, 2.0), 8 * I2)
    zero_S, _ = infinity_transform(np.zeros((2, 2)), T, Q)
    assert norm(zero_S(7, 0.3)) < 1e-15


def test_infinity_transform_requires_commuting():
    rng = np.random.default_rng(6)
    S, T = samples.noncommuting_pair(rng, 2)
    with pytest.raises(NotCommuting):
        infinity_transform(S, T, Q)


def test_infinity_is_irregular_for_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(20):
        S, T = samples.commuting_pair(rng, 2)
        coeffs, _ = infinity_transform(S, T, Q)
        assert classify_singular_point(coeffs, 0).kind == "singular-irregular"


# ---------------------------------------------------------------- classification

def test_classification_examples():
    coeffs = kummer_coeffs_bilateral(S_DIAG, T_DIAG, Q)
    at_zero = classify_singular_point(coeffs, 0)
    assert at_zero.is_singular and at_zero.kind == "singular-regular"
    assert classify_singular_point(coeffs, 0.5).kind == "ordinary"
    plain = BilateralCoefficients.from_mapping({1: lambda z: I2, 2: lambda z: I2}, 2, 0.5)
    assert classify_singular_point(plain, 0.3).kind == "ordinary"


def test_gauss_origin_is_regular():
    rng = np.random.default_rng(8)
    P, Q_, R = samples.diagonal_gauss_triple(rng, 2)
    assert classify_singular_point(gauss_coeffs_bilateral(P, Q_, R, Q), 0).kind == \
        "singular-regular"


def test_classification_rejects_first_order():
    first = BilateralCoefficients.from_mapping({3: lambda z: I2}, 2, 0.5)
    with pytest.raises(ValueError):
        classify_singular_point(first, 0)


# ---------------------------------------------------------------- integral solutions

@pytest.mark.parametrize("s,t,z", [(0.5, 1.5, 0.3), (0.7, 1.9, 0.8), (0.3, 1.2, 1.4)])
def test_integral_u1_scalar_oracle(s, t, z):
    got = integral_solution_u1(np.array([[s]]), np.array([[t]]), Q, z).value[0, 0]
    assert abs(got - complex(oracles.integral_u1(s, t, 0.5, z))) < 1e-9
    assert abs(got - complex(oracles.kummer_u1(s, t, 0.5, z))) < 1e-9


def test_integral_u1_equals_series_and_solves():
    coeffs = kummer_coeffs_bilateral(S_DIAG, T_DIAG, Q)
    U = lambda w: integral_solution_u1(S_DIAG, T_DIAG, Q, w).value  # noqa: E731
    for z in (0.3, 0.6, 0.9):
        assert norm(U(z) - kummer_1phi1(S_DIAG, T_DIAG, Q, 0.5 * z).value) < 1e-10
        assert norm(bilateral_residual(coeffs, U, z)) < 1e-6


@pytest.mark.parametrize("s,t,z", [(0.5, 1.5, 0.4), (1.0, 1.7, 1.1)])
def test_integral_u2_scalar_oracle(s, t, z):
    got = integral_solution_u2(np.array([[s]]), np.array([[t]]), Q, z).value[0, 0]
    expected = complex(oracles.integral_u2(s, t, 0.5, z))
    assert abs(got - expected) <= 1e-12 * abs(expected)


def test_integral_u2_solves():
    coeffs = kummer_coeffs_bilateral(S_DIAG, T_DIAG, Q)
    U = lambda w: integral_solution_u2(S_DIAG, T_DIAG, Q, w).value  # noqa: E731
    for z in (0.3, 0.6, 1.2):
        assert norm(bilateral_residual(coeffs, U, z)) < 1e-6


def test_integral_hypotheses():
    with pytest.raises(NotPositiveStable):
        integral_solution_u1(np.diag([0.5, 1.0]), np.diag([0.4, 1.5]), Q, 0.5)
    with pytest.raises(ValueError):
        integral_solution_u2(S_DIAG, T_DIAG, Q, -0.5)
    with pytest.raises(DivisionByZero):
        integral_solution_u1(S_DIAG, T_DIAG, Q, 0)


def test_exponential_kernel_solves_only_when_t_is_s_plus_one():
    shifted = S_DIAG + I2
    coeffs = kummer_coeffs_bilateral(S_DIAG, shifted, Q)
    U = lambda w: exponential_kernel_u1(S_DIAG, shifted, Q, w).value  # noqa: E731
    for z in (0.3, 0.8):
        assert norm(bilateral_residual(coeffs, U, z)) < 1e-10
        # the sum is a constant multiple of z^-S
        ratio = U(z) @ z_power_matrix(z, S_DIAG)
        assert norm(ratio - U(0.5) @ z_power_matrix(0.5, S_DIAG)) < 1e-10
    general = kummer_coeffs_bilateral(S_DIAG, T_DIAG, Q)
    V = lambda w: exponential_kernel_u1(S_DIAG, T_DIAG, Q, w).value  # noqa: E731
    assert norm(bilateral_residual(general, V, 0.5)) > 1e-3


# ---------------------------------------------------------------- weight recurrences

@pytest.mark.parametrize("u", [0.3, 1.0, 2.5])
def test_weight_recurrences(u):
    rng = np.random.default_rng(9)
    for _ in range(5):
        S, T = samples.commuting_pair(rng, 2)
        assert norm(u1_weight_recurrence_residual(S, T, Q, 0.4, u)) < 1e-10
        assert norm(u2_weight_recurrence_residual(S, T, Q, u)) < 1e-10


@pytest.mark.parametrize("u", [0.3, 1.0, 2.5])
def test_perturbed_weights_fail(u):
    bent1 = lambda v: (1 + v) * u1_weight(S_DIAG, T_DIAG, Q, 0.4, v)  # noqa: E731
    bent2 = lambda v: (1 + v) * u2_weight(S_DIAG, T_DIAG, Q, v)  # noqa: E731
    assert norm(u1_weight_recurrence_residual(S_DIAG, T_DIAG, Q, 0.4, u, bent1)) > 1e-3
    assert norm(u2_weight_recurrence_residual(S_DIAG, T_DIAG, Q, u, bent2)) > 1e-3


@pytest.mark.parametrize("u", [0.3, 1.0, 2.5])
def test_weight_with_reversed_exponent_fails(u):
    # q^(S-T-I) in place of q^(T-S-I) does not satisfy the recurrence
    def reversed_weight(v):
        arg = -q_power_matrix(Q, S_DIAG - T_DIAG - I2) * v
        denom = matrix_q_pochhammer_inf(arg, Q).value
        return q_pochhammer_inf(-v, Q).value * np.linalg.solve(
            denom, z_power_matrix(v, S_DIAG - I2))

    assert norm(u2_weight_recurrence_residual(S_DIAG, T_DIAG, Q, u, reversed_weight)) > 1e-3


def test_u1_weight_at_shifted_parameters_is_a_power():
    F = u1_weight(S_DIAG, S_DIAG + I2, Q, 0.4, 1.3)
    assert_allclose(F, z_power_matrix(1.3, S_DIAG - I2), atol=1e-14)


# ---------------------------------------------------------------- Gauss equation

@pytest.mark.parametrize("seed", range(3))
def test_gauss_solutions(seed):
    rng = np.random.default_rng(20 + seed)
    P, Q_, R = samples.diagonal_gauss_triple(rng, 2)
    coeffs = gauss_coeffs_bilateral(P, Q_, R, Q)
    W1 = lambda w: gauss_2phi1(P, Q_, R, Q, w).value  # noqa: E731
    W2 = lambda w: gauss_solution_w2(P, Q_, R, Q, w).value  # noqa: E731
    for z in (0.2, 0.5, 0.8):
        assert norm(bilateral_residual(coeffs, W1, z)) < 1e-9
        assert norm(bilateral_residual(coeffs, W2, z)) < 1e-9


def test_gauss_non_solution():
    P, Q_, R = np.diag([0.3, 0.6]), np.diag([0.2, 0.8]), np.diag([1.4, 1.6])
    coeffs = gauss_coeffs_bilateral(P, Q_, R, Q)
    W = lambda w: gauss_2phi1(P, Q_, R + 0.2 * I2, Q, w).value  # noqa: E731
    assert norm(bilateral_residual(coeffs, W, 0.5)) > 1e-3


# ---------------------------------------------------------------- general operator

def test_operator_on_1phi1():
    # with r = s = 1 the operator annihilates 1phi1(q^a; q^b; q; (1-q) z)
    a, b = np.diag([0.4, 0.9]), np.diag([1.3, 1.8])
    U = lambda w: rphis_matrix(HypergeometricSpec([a], [b], Q), w).value  # noqa: E731
    for z in (0.2, 0.6):
        assert norm(hypergeometric_operator_residual([a], [b], Q, z, U)) < 1e-12


def test_operator_on_zero_and_requires_parameters():
    zero = lambda w: np.zeros((2, 2))  # noqa: E731
    assert norm(hypergeometric_operator_residual([I2], [I2], Q, 0.4, zero)) == 0
    with pytest.raises(ValueError):
        hypergeometric_operator_residual([], [], Q, 0.4, zero)


def test_operator_two_numerators_matches_scalar_oracle():
    a, b, c, z = 0.3, 0.6, 1.4, 0.5
    U = lambda w: np.array([[complex(oracles.gauss_w1(a, b, c, 0.5, w))]])  # noqa: E731
    got = hypergeometric_operator_residual([np.array([[a]]), np.array([[b]])],
                                           [np.array([[c]])], Q, z, U)[0, 0]
    assert abs(got) < 1e-12
    oracle = oracles.gauss_scalar_residual(lambda w: oracles.gauss_w1(a, b, c, 0.5, w),
                                           a, b, c, 0.5, mp.mpf(z))
    assert abs(oracle) < 1e-25
