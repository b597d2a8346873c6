import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from qmatfun import (
    BranchCutViolation,
    QParameter,
    SingularFactor,
    check_q_sigma_condition,
    mat_log_principal,
    matrix_q_pochhammer,
    matrix_q_pochhammer_inf,
    matrix_q_pochhammer_inv,
    q_bracket_matrix,
    q_number,
    q_pochhammer,
    q_pochhammer_inf,
    q_power_matrix,
    spectral_info,
    z_power_matrix,
)
from qmatfun.qmatrix import as_matrix, commutes

Q = QParameter(0.5)
I2 = np.eye(2)


def right_half_plane(rng, p):
    """Random matrix V diag(mu) V^-1 with Re mu > 0 and a well-conditioned V."""
    mu = rng.uniform(0.3, 3, p) + 1j * rng.uniform(-2, 2, p)
    V = np.eye(p) + 0.3 * (rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p)))
    return V @ np.diag(mu) @ np.linalg.inv(V)


def simultaneous(rng, p, *spectra):
    V = np.eye(p) + 0.3 * rng.standard_normal((p, p))
    Vinv = np.linalg.inv(V)
    return V, Vinv, [V @ np.diag(d) @ Vinv for d in spectra]


# ---------------------------------------------------------------- validation

@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.zeros((0, 0)), np.full((2, 2), np.nan),
                                 np.eye(65)])
def test_as_matrix_rejects(bad):
    with pytest.raises(ValueError):
        as_matrix(bad)


def test_as_matrix_scalar_is_1x1():
    assert as_matrix(2.5).shape == (1, 1)


# ---------------------------------------------------------------- spectra

def test_spectral_info_examples():
    info = spectral_info(I2)
    assert_allclose(info.eigenvalues, [1, 1])
    assert info.alpha == info.beta == 1 and info.positive_stable
    info = spectral_info(np.diag([-1.0, 2.0]))
    assert (info.alpha, info.beta, info.positive_stable) == (2, -1, False)
    info = spectral_info([[0, 1], [-1, 0]])
    assert_allclose(sorted(info.eigenvalues, key=lambda x: x.imag), [-1j, 1j], atol=1e-15)
    assert info.alpha == pytest.approx(0) and not info.positive_stable


# ---------------------------------------------------------------- logarithm and powers

def test_log_examples():
    assert_allclose(mat_log_principal(I2), np.zeros((2, 2)), atol=1e-15)
    assert_allclose(mat_log_principal(np.diag([np.e, np.e**2])), np.diag([1, 2]), atol=1e-14)


def test_log_round_trip_many():
    rng = np.random.default_rng(0)
    for _ in range(100):
        M = right_half_plane(rng, int(rng.integers(1, 5)))
        back = scipy.linalg.expm(mat_log_principal(M))
        assert np.linalg.norm(back - M) <= 1e-10 * np.linalg.norm(M)


def test_log_defective_falls_back_to_schur():
    M = np.array([[2.0, 1.0], [0.0, 2.0]])
    L = mat_log_principal(M)
    assert_allclose(scipy.linalg.expm(L), M, atol=1e-12)


def test_log_branch_cut():
    with pytest.raises(BranchCutViolation):
        mat_log_principal(np.diag([-1.0, 2.0]))


def test_q_power_examples():
    assert_allclose(q_power_matrix(Q, np.zeros((2, 2))), I2)
    assert_allclose(q_power_matrix(Q, I2), 0.5 * I2)
    assert_allclose(q_power_matrix(Q, np.diag([1, 2])), np.diag([0.5, 0.25]))


def test_z_power_examples():
    M = np.array([[0.3, 2.0], [-1.0, 0.7]])
    assert_allclose(z_power_matrix(1, M), I2, atol=1e-15)
    assert_allclose(z_power_matrix(4, I2), 4 * I2)
    assert_allclose(z_power_matrix(4, np.diag([0.5, -0.5])), np.diag([2, 0.5]))


def test_z_power_rejects_cut():
    with pytest.raises(BranchCutViolation):
        z_power_matrix(-2.0, I2)


def test_commuting_exponent_law():
    rng = np.random.default_rng(1)
    for _ in range(20):
        V, Vinv, (P, R) = simultaneous(rng, 3, rng.uniform(-1, 2, 3), rng.uniform(-1, 2, 3))
        assert commutes(P, R, rtol=1e-10)
        lhs = q_power_matrix(Q, P + R)
        rhs = q_power_matrix(Q, P) @ q_power_matrix(Q, R)
        assert np.linalg.norm(lhs - rhs) <= 1e-11 * max(1, np.linalg.norm(lhs))


# ---------------------------------------------------------------- brackets and Pochhammers

def test_bracket_examples():
    assert_allclose(q_bracket_matrix(np.zeros((2, 2)), Q), np.zeros((2, 2)), atol=1e-15)
    assert_allclose(q_bracket_matrix(I2, Q), I2)
    d = np.array([0.3, 1.7, -0.4])
    assert_allclose(np.diag(q_bracket_matrix(np.diag(d), Q)), [q_number(x, Q) for x in d])


def test_bracket_classical_limit():
    P = np.array([[1.0, 0.4], [-0.2, 2.0]])
    got = q_bracket_matrix(P, QParameter(0.999))
    assert np.linalg.norm(got - P) <= 5e-3 * np.linalg.norm(P)


def test_pochhammer_examples():
    P = np.array([[0.2, 1.0], [0.5, 0.9]])
    assert_allclose(matrix_q_pochhammer(P, Q, 0), I2)
    assert_allclose(matrix_q_pochhammer(np.zeros((2, 2)), Q, 1), np.zeros((2, 2)), atol=1e-15)
    a, b = 0.4, 1.3
    got = matrix_q_pochhammer(np.diag([a, b]), Q, 4)
    assert_allclose(np.diag(got), [q_pochhammer(0.5**a, Q, 4), q_pochhammer(0.5**b, Q, 4)])
    assert abs(got[0, 1]) == 0


@pytest.mark.parametrize("n", range(6))
def test_pochhammer_recurrence(n):
    P = np.array([[0.2, 1.0], [0.5, 0.9]])
    lhs = matrix_q_pochhammer(P, Q, n + 1)
    rhs = matrix_q_pochhammer(P, Q, n) @ (I2 - q_power_matrix(Q, P + n * I2))
    assert_allclose(lhs, rhs, atol=1e-15)


def test_pochhammer_inverse():
    P = np.array([[0.2, 1.0], [0.5, 0.9]])
    assert_allclose(matrix_q_pochhammer_inv(P, Q, 0), I2)
    for n in range(1, 8):
        prod = matrix_q_pochhammer(P, Q, n) @ matrix_q_pochhammer_inv(P, Q, n)
        assert_allclose(prod, I2, atol=1e-12)
    inv = matrix_q_pochhammer_inv(np.diag([0.4, 1.3]), Q, 3)
    assert_allclose(np.diag(inv), [1 / q_pochhammer(0.5**0.4, Q, 3),
                                   1 / q_pochhammer(0.5**1.3, Q, 3)])


def test_pochhammer_inverse_singular_factor_is_named():
    # q^(P+kI) = I at k = 2 when P has eigenvalue -2
    with pytest.raises(SingularFactor) as info:
        matrix_q_pochhammer_inv(np.diag([-2.0, 0.5]), Q, 4)
    assert info.value.k == 2


def test_functions_of_P_commute():
    rng = np.random.default_rng(2)
    P = rng.standard_normal((3, 3))
    B = q_bracket_matrix(P, Q)
    for M in [q_power_matrix(Q, P)] + [matrix_q_pochhammer(P, Q, n) for n in range(5)]:
        assert np.linalg.norm(B @ M - M @ B) <= 1e-12 * max(1, np.linalg.norm(M))


def test_pochhammer_inf_examples():
    assert_allclose(matrix_q_pochhammer_inf(np.zeros((2, 2)), Q).value, I2)
    a = 0.37
    got = matrix_q_pochhammer_inf(a * I2, Q).value
    assert_allclose(got, q_pochhammer_inf(a, Q).value * I2, atol=1e-15)


def test_pochhammer_inf_diagonalisable():
    rng = np.random.default_rng(3)
    d = rng.uniform(-1.5, 1.5, 3) + 0.5j * rng.uniform(-1, 1, 3)
    V, Vinv, (M,) = simultaneous(rng, 3, d)
    got = matrix_q_pochhammer_inf(M, Q).value
    expected = V @ np.diag([complex(oracles.poch_inf(x, 0.5)) for x in d]) @ Vinv
    assert np.linalg.norm(got - expected) <= 1e-9


# ---------------------------------------------------------------- sigma condition

def test_sigma_condition_examples():
    assert check_q_sigma_condition(I2, Q, 10)
    assert not check_q_sigma_condition(-I2, Q, 2)
    rng = np.random.default_rng(4)
    for _ in range(10):
        T = right_half_plane(rng, 3)
        assert check_q_sigma_condition(T, Q, 40)


def test_sigma_condition_includes_first_factor():
    # T = 0 makes I - q^T vanish already at k = 0
    assert not check_q_sigma_condition(np.zeros((2, 2)), Q, 5)


# ---------------------------------------------------------------- diagonalisation oracle

@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.1, 2.5), min_size=3, max_size=3), st.integers(0, 6),
       st.floats(0.1, 0.9))
def test_simultaneous_diagonalisation(spec, n, q):
    qp = QParameter(q)
    rng = np.random.default_rng(n)
    d = np.array(spec)
    V, Vinv, (P,) = simultaneous(rng, 3, d)
    conj = lambda vals: V @ np.diag(vals) @ Vinv  # noqa: E731
    checks = [
        (q_power_matrix(qp, P), conj(q**d)),
        (q_bracket_matrix(P, qp), conj([q_number(x, qp) for x in d])),
        (matrix_q_pochhammer(P, qp, n), conj([q_pochhammer(q**x, qp, n) for x in d])),
        (z_power_matrix(1.7, P), conj(1.7**d)),
    ]
    for got, expected in checks:
        assert np.linalg.norm(got - expected) <= 1e-9 * max(1, np.linalg.norm(expected))
