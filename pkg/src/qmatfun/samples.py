"""Random inputs for the verification suites.

All generators take a ``numpy.random.Generator`` so that a seed fixes the
whole suite.  The shifts keep the spectra away from the poles of the
q-Pochhammer inverses and inside the positive half plane where needed.
"""
import numpy as np


def _complex_normal(rng, p):
    return rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))


def noncommuting_pair(rng, p, scale=0.3, s_shift=0.5, t_shift=1.0):
    """(S, T) = (s_shift I + scale X, t_shift I + scale Y) with X, Y Gaussian."""
    eye = np.eye(p)
    S = s_shift * eye + scale * _complex_normal(rng, p)
    T = t_shift * eye + scale * _complex_normal(rng, p)
    return S, T


def commuting_diagonal_pair(rng, p):
    """Diagonal S, T with S, T and T - S positive stable and T - I off the integers."""
    t = rng.uniform(1.1, 1.9, p)
    s = rng.uniform(0.2, t - 0.3)
    return np.diag(s), np.diag(t)


def commuting_pair(rng, p):
    """A commuting pair that is not diagonal: V D1 V^-1, V D2 V^-1."""
    S, T = commuting_diagonal_pair(rng, p)
    V = np.eye(p) + 0.3 * _complex_normal(rng, p)
    Vinv = np.linalg.inv(V)
    return V @ S @ Vinv, V @ T @ Vinv


def diagonal_gauss_triple(rng, p):
    """Diagonal (P, Q, R) with R - I off the integers."""
    P = np.diag(rng.uniform(0.1, 0.9, p))
    Q = np.diag(rng.uniform(0.1, 0.9, p))
    R = np.diag(rng.uniform(1.1, 1.9, p))
    return P, Q, R


def positive_stable(rng, p, shift=1.5, scale=0.2):
    """shift I + scale X, positive stable for the default arguments."""
    return shift * np.eye(p) + scale * _complex_normal(rng, p)


def polynomial(rng, degree=3):
    """Random complex polynomial coefficients, lowest order first."""
    return rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)


def eval_polynomial(coeffs, z):
    return np.polynomial.polynomial.polyval(z, coeffs)
