"""Named special functions and matrix polynomials expressed through pRq.

Each constructor returns a :class:`SpecialForm`; its ``evaluate`` runs the
shared series engine and applies the outer factors, so every classical
object inherits the engine's truncation and termination diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import series
from .gammakit import gamma_m, pochhammer
from .matcore import as_matrix, eye
from .series import EvalResult, ParameterSet, SeriesOptions


def _identity_map(x):
    return x


@dataclass(frozen=True)
class SpecialForm:
    """value(x) = pre_factor @ pRq(params; argument_map(x)) @ post_factor."""

    params: ParameterSet
    pre_factor: np.ndarray
    post_factor: np.ndarray
    argument_map: Callable[[complex], complex] = _identity_map
    label: str = ""

    def evaluate(self, x, opts: SeriesOptions | None = None) -> EvalResult:
        res = series.eval(self.params, self.argument_map(x), opts)
        return replace(res, value=self.pre_factor @ res.value @ self.post_factor)

    def value(self, x, opts: SeriesOptions | None = None) -> np.ndarray:
        return self.evaluate(x, opts).value


def _form(params: ParameterSet, label: str, pre=None, post=None, argument_map=_identity_map) -> SpecialForm:
    I = eye(params.r)
    pre = I if pre is None else as_matrix(pre)
    post = I if post is None else as_matrix(post)
    return SpecialForm(params, pre, post, argument_map, label)


def _dim(*mats) -> int:
    return as_matrix(mats[0]).shape[0]


def hypergeometric_pFq(numer: Sequence, denom: Sequence, dim: int | None = None) -> SpecialForm:
    """Generalized hypergeometric function with matrix parameters (A = B = I, C_p = I)."""
    mats = list(numer) + list(denom)
    r = dim if dim is not None else _dim(*mats)
    I = eye(r)
    params = ParameterSet(I, I, tuple(numer) + (I,), tuple(denom))
    return _form(params, f"{len(numer)}F{len(denom)}")


def gauss_2F1(a, b, c) -> SpecialForm:
    return replace(hypergeometric_pFq([a, b], [c]), label="2F1")


def confluent_1F1(a, c) -> SpecialForm:
    return replace(hypergeometric_pFq([a], [c]), label="1F1")


def m_series(A, B, numer: Sequence = (), denom: Sequence = ()) -> SpecialForm:
    """Matrix M-series: sum Gamma^-1(nA+B) (C_1)_n..(D_q)_n^-1 z^n."""
    I = eye(_dim(A))
    return _form(ParameterSet(A, B, tuple(numer) + (I,), tuple(denom)), f"{len(numer)}M{len(denom)}")


def mittag_leffler(A) -> SpecialForm:
    """E_A(z) = sum Gamma^-1(nA + I) z^n."""
    I = eye(_dim(A))
    return _form(ParameterSet(A, I, (I,)), "E_A")


def mittag_leffler_2(A, B) -> SpecialForm:
    """E_{A,B}(z) = sum Gamma^-1(nA + B) z^n."""
    I = eye(_dim(A))
    return _form(ParameterSet(A, B, (I,)), "E_A,B")


def mittag_leffler_3(A, B, C) -> SpecialForm:
    """E^C_{A,B}(z) = sum Gamma^-1(nA + B) (C)_n z^n / n!."""
    return _form(ParameterSet(A, B, (C,)), "E^C_A,B")


def mittag_leffler_4(A, B, C, D) -> SpecialForm:
    """E^{C,D}_{A,B}(z) = sum Gamma^-1(nA + B) (C)_n (D)_n^-1 z^n."""
    I = eye(_dim(A))
    return _form(ParameterSet(A, B, (C, I), (D,)), "E^C,D_A,B")


def bessel_maitland(A, B) -> SpecialForm:
    """J_A^B(z) = sum Gamma^-1(nA + B + I) (-z)^n / n!."""
    I = eye(_dim(A))
    return _form(ParameterSet(A, as_matrix(B) + I), "J_A^B", argument_map=lambda x: -x)


def jacobi_poly(A, C, k: int) -> SpecialForm:
    """P_k^(A,C)(x) with argument (1+x)/2; terminates after k+1 terms."""
    A = as_matrix(A, "A")
    C = as_matrix(C, "C")
    I = eye(A.shape[0])
    params = ParameterSet(0 * I, C + I, (A + C + (k + 1) * I, -k * I), (C + I,))
    pre = (-1) ** k / math.factorial(k) * I
    return _form(params, f"P_{k}^(A,C)", pre, gamma_m(C + (k + 1) * I), lambda x: (1 + x) / 2)


def legendre_poly(D, k: int, B=None) -> SpecialForm:
    """P_k(x, D) with argument (1-x)/2. B defaults to I."""
    D = as_matrix(D, "D")
    I = eye(D.shape[0])
    B = I if B is None else as_matrix(B, "B")
    params = ParameterSet(0 * I, B, ((k + 1) * I, -k * I), (D,))
    return _form(params, f"P_{k}(x,D)", argument_map=lambda x: (1 - x) / 2)


def gegenbauer_poly(D, k: int, B=None) -> SpecialForm:
    """C_k^D(x) = (2D)_k / k! * 2R1(2D + kI, -kI; D + I/2 | 0, B; (1-x)/2)."""
    D = as_matrix(D, "D")
    I = eye(D.shape[0])
    B = I if B is None else as_matrix(B, "B")
    params = ParameterSet(0 * I, B, (2 * D + k * I, -k * I), (D + 0.5 * I,))
    pre = pochhammer(2 * D, k) / math.factorial(k)
    return _form(params, f"C_{k}^D", pre, argument_map=lambda x: (1 - x) / 2)


def konhauser_poly(C, k: int, m: int) -> SpecialForm:
    """Z_m^C(x, k) = Gamma(C + (km+1)I) / m! * 1R0(-mI | kI, C + I; x^k)."""
    C = as_matrix(C, "C")
    I = eye(C.shape[0])
    params = ParameterSet(k * I, C + I, (-m * I,))
    pre = gamma_m(C + (k * m + 1) * I) / math.factorial(m)
    return _form(params, f"Z_{m}^C(x,{k})", pre, argument_map=lambda x: x**k)


def laguerre_poly(C, m: int) -> SpecialForm:
    """Laguerre matrix polynomial, the k = 1 Konhauser polynomial."""
    return konhauser_poly(C, 1, m)


CONSTRUCTORS = {
    "hypergeometric": hypergeometric_pFq,
    "gauss_2f1": gauss_2F1,
    "confluent_1f1": confluent_1F1,
    "m_series": m_series,
    "mittag_leffler": mittag_leffler,
    "mittag_leffler_2": mittag_leffler_2,
    "mittag_leffler_3": mittag_leffler_3,
    "mittag_leffler_4": mittag_leffler_4,
    "bessel_maitland": bessel_maitland,
    "jacobi": jacobi_poly,
    "legendre": legendre_poly,
    "gegenbauer": gegenbauer_poly,
    "konhauser": konhauser_poly,
    "laguerre": laguerre_poly,
}
