import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from matfn import series
from matfn.errors import DomainError, PreconditionError
from matfn.fraccalc import (
    FracOrder,
    frac_derivative,
    frac_derivative_oracle,
    frac_int_monomial,
    frac_integral,
    frac_integral_oracle,
    rl_quad_oracle,
)
from matfn.series import ParameterSet, SeriesOptions

TIGHT = SeriesOptions(rel_tol=1e-15, max_terms=2000)
I2 = np.eye(2)


def test_monomial_examples():
    assert_allclose(frac_int_monomial(I2, 1, 2.0), 2 * I2, rtol=1e-14)
    assert_allclose(frac_int_monomial([[1.5]], 0.5, 1.0)[0, 0], math.sqrt(math.pi) / 2, rtol=1e-14)
    assert_allclose(frac_int_monomial(np.diag([1.0, 2.0]), 1, 1.0), np.diag([1.0, 0.5]), rtol=1e-14)


def test_monomial_needs_stable_exponent():
    with pytest.raises(PreconditionError):
        frac_int_monomial(np.diag([1.0, -0.5]), 0.5, 1.0)


def test_order_validation():
    with pytest.raises(DomainError):
        FracOrder(-0.5)
    with pytest.raises(DomainError):
        FracOrder(0)
    assert FracOrder(1.7).n_ceil == 2


def test_oracle_examples():
    assert_allclose(rl_quad_oracle(lambda t: np.eye(2), 1, 2.0), 2 * I2, rtol=1e-13)
    assert_allclose(rl_quad_oracle(lambda t: t * np.eye(2), 1, 1.0), I2 / 2, rtol=1e-12)
    got = rl_quad_oracle(lambda t: math.sqrt(t) * np.eye(2), 0.5, 1.0)
    assert_allclose(got, math.gamma(1.5) / math.gamma(2.0) * I2, rtol=1e-10)


def test_mu_one_is_antiderivative():
    P = ParameterSet.scalar(1, 1, [1.2], [2])
    x = 0.5

    def weighted(t):
        return complex(series.value(P, float(t), TIGHT)[0, 0]).real * t

    want = float(mpmath.quad(weighted, [0, x]))
    assert_allclose(frac_integral(P, 1, 1.0, x, TIGHT)[0, 0], want, rtol=1e-8)


def test_unweighted_at_unit_D():
    P = ParameterSet.scalar(1, 1, [1.2], [1])
    want = float(mpmath.quad(lambda t: complex(series.value(P, float(t), TIGHT)[0, 0]).real, [0, 0.7]))
    assert_allclose(frac_integral(P, 1, 1.0, 0.7, TIGHT)[0, 0], want, rtol=1e-8)


def test_integral_diagonal_vs_oracle():
    P = ParameterSet(np.diag([1.0, 0.5]), np.diag([1.0, 1.5]), (np.diag([1.2, 0.8]),), (np.diag([2.0, 1.5]),))
    closed = frac_integral(P, 1, 0.5, 0.4, TIGHT)
    oracle = frac_integral_oracle(P, 1, 0.5, 0.4, TIGHT)
    assert_allclose(closed, oracle, rtol=1e-6, atol=1e-12)


def test_derivative_scalar_vs_composition():
    P = ParameterSet.scalar(1, 1, [1.2], [2])
    closed = frac_derivative(P, 1, 0.5, 0.5, TIGHT)
    oracle = frac_derivative_oracle(P, 1, 0.5, 0.5, TIGHT)
    assert_allclose(closed, oracle, rtol=1e-6)


def test_round_trip():
    P = ParameterSet.scalar(1, 1, [1.2], [2.5])
    mu = 0.7
    Pint = ParameterSet(P.A, P.B, P.C, (P.D[0] + mu * np.eye(1),))
    # D^mu of I^mu[R x^(D-I)] is the closed form of D^mu applied to the shifted weight
    back = frac_derivative(Pint, 1, mu, 0.6, TIGHT)
    want = series.value(P, 0.6, TIGHT) * 0.6 ** (P.D[0][0, 0].real - 1)
    d = P.D[0][0, 0].real
    scale = math.gamma(d + mu) / math.gamma(d)
    assert_allclose(back * (1 / scale), want, rtol=1e-6)


def test_evaluation_point_must_be_positive():
    P = ParameterSet.scalar(1, 1, [1.2], [2])
    with pytest.raises(DomainError):
        frac_integral(P, 1, 0.5, -0.3)
    with pytest.raises(IndexError):
        frac_integral(P, 2, 0.5, 0.3)
