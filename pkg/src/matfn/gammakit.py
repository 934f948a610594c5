"""Gamma, reciprocal gamma, Pochhammer and beta functions of a matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.special

from .errors import DomainError, PreconditionError
from .matcore import (
    DEFAULT_TOL,
    ScalarFunction,
    _mp_taylor,
    as_matrix,
    commutator_norm,
    eigenvalues,
    eye,
    matfun,
)
from .quadrature import integrate_beta_kernel


def _real_where_possible(fn_real, fn_complex, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    real = z.imag == 0
    out[real] = fn_real(z.real[real])
    out[~real] = fn_complex(z[~real])
    return out


class GammaFunction(ScalarFunction):
    name = "gamma"

    def value(self, z):
        return _real_where_possible(scipy.special.gamma, scipy.special.gamma, z)

    def taylor(self, center, order):
        return _mp_taylor(mpmath.gamma, center, order)


class ReciprocalGammaFunction(ScalarFunction):
    name = "rgamma"

    def value(self, z):
        return _real_where_possible(scipy.special.rgamma, scipy.special.rgamma, z)

    def taylor(self, center, order):
        return _mp_taylor(mpmath.rgamma, center, order)


GAMMA = GammaFunction()
RGAMMA = ReciprocalGammaFunction()

# beyond this real part 1/Gamma underflows in double precision
RGAMMA_SCALE_THRESHOLD = 150.0


class ScaledReciprocalGammaFunction(ScalarFunction):
    """z -> exp(-log_shift) / Gamma(z), through log-gamma so huge arguments do not underflow."""

    name = "rgamma_scaled"

    def __init__(self, log_shift: float):
        self.log_shift = float(log_shift)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        lg = scipy.special.loggamma(z)
        finite = np.isfinite(lg)  # poles give 1/Gamma = 0
        out = np.zeros(z.shape, dtype=complex)
        out[finite] = np.exp(-lg[finite] - self.log_shift)
        return out

    def taylor(self, center, order):
        shift = self.log_shift
        return _mp_taylor(lambda w: mpmath.exp(-mpmath.loggamma(w) - shift), center, order)


def rgamma_log_shift(lam) -> float:
    """Scale s such that exp(-s) / Gamma stays representable on the eigenvalues ``lam``.

    Zero unless some eigenvalue is large enough for 1/Gamma to underflow.
    """
    lam = np.asarray(lam, dtype=complex)
    if lam.size == 0 or lam.real.max() < RGAMMA_SCALE_THRESHOLD:
        return 0.0
    lg = scipy.special.loggamma(lam)
    return float(np.max(-lg[np.isfinite(lg)].real))


def rgamma_m_scaled(A) -> tuple[np.ndarray, float]:
    """(M, s) with 1/Gamma(A) = exp(s) M; s is 0 unless 1/Gamma(A) would underflow."""
    A = as_matrix(A, "A")
    s = rgamma_log_shift(eigenvalues(A))
    if s == 0.0:
        return matfun(A, RGAMMA), 0.0
    return matfun(A, ScaledReciprocalGammaFunction(s)), s


@dataclass(frozen=True)
class SpectralBounds:
    alpha: float  # max real part of the spectrum
    beta: float  # min real part of the spectrum

    @property
    def positive_stable(self) -> bool:
        return self.beta > 0


def spectral_bounds(A) -> SpectralBounds:
    re = eigenvalues(A).real
    return SpectralBounds(float(re.max()), float(re.min()))


def is_positive_stable(A) -> bool:
    return spectral_bounds(A).beta > 0


def _pole_eigenvalues(lam: np.ndarray) -> list[complex]:
    near = np.round(lam.real)
    hit = (near <= 0) & (np.abs(lam - near) <= 1e-12 * np.maximum(1.0, np.abs(lam)))
    return [complex(v) for v in lam[hit]]


def gamma_m(A) -> np.ndarray:
    """Gamma(A) through the functional calculus."""
    A = as_matrix(A, "A")
    poles = _pole_eigenvalues(eigenvalues(A))
    if poles:
        raise DomainError(f"gamma_m: eigenvalue(s) {poles} lie on a gamma pole")
    return matfun(A, GAMMA)


def rgamma_m(A) -> np.ndarray:
    """Reciprocal gamma 1/Gamma(A); entire, so defined for every A."""
    return matfun(as_matrix(A, "A"), RGAMMA)


def pochhammer(A, n: int) -> np.ndarray:
    """(A)_n = A (A+I) ... (A+(n-1)I), with (A)_0 = I."""
    A = as_matrix(A, "A")
    if n < 0:
        raise DomainError("pochhammer needs n >= 0")
    I = eye(A.shape[0])
    P = I.copy()
    for k in range(n):
        P = P @ (A + k * I)
    return P


def require_commuting(X, Y, what: str, tol: float = DEFAULT_TOL) -> None:
    c = commutator_norm(X, Y)
    if c > tol:
        raise PreconditionError(f"{what} must commute (relative commutator {c:.3e} > {tol:g})")


def require_positive_stable(X, what: str) -> None:
    b = spectral_bounds(X).beta
    if not b > 0:
        raise PreconditionError(f"{what} must be positive stable (min Re eigenvalue {b:.6g})")


def beta_m(A, B, path: str = "gamma_product", n_nodes: int = 128, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Beta matrix function.

    ``path="gamma_product"`` uses Gamma(A) Gamma(B) Gamma^-1(A+B) and needs
    AB = BA with A, B, A+B positive stable. ``path="quadrature"`` integrates
    t^(A-I) (1-t)^(B-I) over (0, 1) with Gauss-Jacobi rules.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if path == "gamma_product":
        require_commuting(A, B, "A and B", tol)
        for M, label in ((A, "A"), (B, "B"), (A + B, "A+B")):
            require_positive_stable(M, label)
        return gamma_m(A) @ gamma_m(B) @ rgamma_m(A + B)
    if path == "quadrature":
        for M, label in ((A, "A"), (B, "B")):
            if not is_positive_stable(M):
                raise DomainError(f"beta_m quadrature path needs {label} positive stable")
        return integrate_beta_kernel(A, B, n_nodes)
    raise ValueError(f"unknown beta path {path!r}")

