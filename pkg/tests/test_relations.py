import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from matfn import series
from matfn.errors import DomainError, PreconditionError
from matfn.gammakit import rgamma_m
from matfn.relations import (
    IDENTITY_IDS,
    check_bilateral,
    check_simple_Ci,
    check_simple_Dj,
    check_theta_Ci,
    check_theta_Dj,
    check_zA_deriv,
    deriv_formula,
    deriv_weighted_Ci,
    deriv_weighted_Dj,
    run_suite,
    theta_R,
)
from matfn.series import ParameterSet, SeriesOptions

from oracles import commuting_family

TIGHT = SeriesOptions(rel_tol=1e-15, max_terms=2000)

DIAG = ParameterSet(
    np.diag([1.0, 1.5]),
    np.diag([2.0, 3.0]),
    (np.diag([1.2, 0.7]), np.diag([2.0, 1.5])),
    (np.diag([3.0, 2.5]),),
)


def test_theta_at_zero():
    assert_allclose(theta_R(DIAG, 0.0), np.zeros((2, 2)), atol=0)


def test_theta_exponential():
    assert_allclose(theta_R(ParameterSet.scalar(1, 1, [1]), 1.0)[0, 0], math.e, rtol=1e-14)


def test_theta_diagonal_per_entry():
    got = theta_R(DIAG, 0.3)
    h = 1e-5
    for k in range(2):
        P = ParameterSet.scalar(DIAG.A[k, k], DIAG.B[k, k], [c[k, k] for c in DIAG.C], [d[k, k] for d in DIAG.D])
        fd = (series.value(P, 0.3 + h) - series.value(P, 0.3 - h))[0, 0] / (2 * h)
        assert_allclose(got[k, k], 0.3 * fd, rtol=1e-8)


def test_theta_Ci_scalar():
    assert check_theta_Ci(1, ParameterSet.scalar(1, 1, [2], [3]), 0.4).residual <= 1e-10


def test_theta_Ci_and_Dj_diagonal():
    for i in (1, 2):
        assert check_theta_Ci(i, DIAG, 0.3).residual <= 1e-10
    assert check_theta_Dj(1, DIAG, 0.3).residual <= 1e-10


def test_bilateral_at_zero():
    rep = check_bilateral(1, 1, DIAG, 0.0)
    rB = rgamma_m(DIAG.B)
    want = DIAG.C[0] @ rB - rB @ (DIAG.D[0] - np.eye(2))
    assert_allclose(rep.lhs, want, atol=1e-14)
    assert_allclose(rep.rhs, want, atol=1e-14)


def test_bilateral_scalar():
    assert check_bilateral(1, 1, ParameterSet.scalar(1, 1, [1.2], [2.5]), 0.5).residual <= 1e-10


def test_simple_Ci_identical_shift_is_zero():
    P = ParameterSet.scalar(1, 1, [1.3, 1.3], [2])
    rep = check_simple_Ci(2, P, 0.3)
    assert_allclose(rep.lhs, 0, atol=1e-15)
    assert rep.residual <= 1e-12


def test_simple_Ci_scalar_and_diagonal():
    assert check_simple_Ci(2, ParameterSet.scalar(1, 1, [1, 2], [3]), 0.3).residual <= 1e-10
    assert check_simple_Ci(2, DIAG, 0.3).residual <= 1e-10
    assert check_simple_Dj(1, DIAG, 0.3).residual <= 1e-10


def test_deriv_formula_order_three():
    assert deriv_formula(DIAG, 0.3, order=3, opts=TIGHT).residual <= 1e-8


def test_deriv_weighted_Dj_scalar():
    P = ParameterSet.scalar(1, 1, [1.5], [2.5])
    for order in (1, 2):
        assert deriv_weighted_Dj(P, 0.6, 1, order).residual <= 1e-9


def test_deriv_weighted_Ci_scalar_and_small_z():
    P = ParameterSet.scalar(1, 1, [2], [])
    assert deriv_weighted_Ci(P, 0.5, 1).residual <= 1e-9
    assert deriv_weighted_Ci(P, 1e-3, 1).residual <= 1e-9
    assert deriv_weighted_Ci(DIAG, 0.4, 2, order=2).residual <= 1e-9


def test_displayed_weight_only_matches_first_order():
    P = ParameterSet.scalar(1, 1, [2], [])
    assert deriv_weighted_Ci(P, 0.5, 1, order=1, displayed_weight=True).residual <= 1e-9
    assert deriv_weighted_Ci(P, 0.5, 1, order=2, displayed_weight=True).residual > 1e-3


def test_weighted_needs_positive_real_z():
    with pytest.raises(DomainError):
        deriv_weighted_Dj(DIAG, -0.5, 1)
    with pytest.raises(DomainError):
        deriv_weighted_Ci(DIAG, 0.3 + 0.1j, 1)


def test_zA_deriv_examples():
    assert check_zA_deriv(ParameterSet.scalar(1, 2, [1], []), 0.4).residual <= 1e-10
    P = ParameterSet(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]), (), ())
    assert check_zA_deriv(P, 0.3).residual <= 1e-10


def test_zA_deriv_hypotheses():
    P = ParameterSet.scalar(1, 1, [1], [])  # B - I = 0 is not positive stable
    with pytest.raises(PreconditionError, match="B-I"):
        check_zA_deriv(P, 0.3)
    rep = check_zA_deriv(P, 0.3, strict=False)
    assert not rep.hypotheses_met


def test_commutation_violation_names_pair():
    P = ParameterSet(np.array([[1.0, 1.0], [0.0, 2.0]]), np.eye(2), (np.array([[2.0, 0.0], [1.0, 3.0]]),), (2 * np.eye(2),))
    with pytest.raises(PreconditionError, match="C_1 and A"):
        check_bilateral(1, 1, P, 0.3)
    assert not check_bilateral(1, 1, P, 0.3, strict=False).hypotheses_met


def test_index_out_of_range():
    with pytest.raises(IndexError):
        check_theta_Ci(3, DIAG, 0.3)


def test_run_suite_covers_all_and_skips_complex():
    reps = run_suite(DIAG, 0.3, opts=TIGHT, strict=True)
    assert {r.identity_id for r in reps} == set(IDENTITY_IDS)
    assert max(r.residual for r in reps if not r.skipped) <= 1e-9
    reps = run_suite(DIAG, 0.2 + 0.1j, opts=TIGHT)
    skipped = {r.identity_id for r in reps if r.skipped}
    assert skipped == {"DerivWeightDj", "DerivWeightCi"}
    with pytest.raises(ValueError):
        run_suite(DIAG, 0.3, identities=["Nope"])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.7))
def test_suite_on_commuting_families(seed, x):
    rng = np.random.default_rng(seed)
    P = commuting_family(rng, 2, 2, 1, b_lo=1.5)
    reps = run_suite(P, x, opts=TIGHT, strict=True)
    assert max(r.residual for r in reps if not r.skipped) <= 1e-9
