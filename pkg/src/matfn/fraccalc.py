"""Riemann-Liouville fractional integral and derivative of R(z) z^(D_j - I).

Closed forms come from applying the power rule term by term:

    I^mu [R z^(D_j-I)] = R(D_j + mu I) z^(D_j + (mu-1)I) Gamma(D_j) Gamma^-1(D_j + mu I)
    D^mu [R z^(D_j-I)] = R(D_j - mu I) z^(D_j - (mu+1)I) Gamma(D_j) Gamma^-1(D_j - mu I)

``rl_quad_oracle`` evaluates the defining integral directly and serves as the
independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.special

from . import relations, series
from .errors import AccuracyError, DomainError, PreconditionError
from .gammakit import gamma_m, rgamma_m, spectral_bounds
from .matcore import as_matrix, commutator_norm, eye, fro_norm, matpow_base
from .quadrature import jacobi_rule
from .series import ParameterSet, SeriesOptions, shift


@dataclass(frozen=True)
class FracOrder:
    mu: complex

    def __post_init__(self):
        mu = complex(self.mu)
        if not mu.real > 0:
            raise DomainError(f"fractional order needs Re(mu) > 0, got {mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def n_ceil(self) -> int:
        return math.ceil(self.mu.real)


def _order(mu) -> FracOrder:
    return mu if isinstance(mu, FracOrder) else FracOrder(mu)


def _positive(x) -> float:
    if not (isinstance(x, (int, float, np.floating, np.integer)) and x > 0):
        raise DomainError(f"evaluation point must be a positive real, got {x!r}")
    return float(x)


def frac_int_monomial(A, mu, x: float) -> np.ndarray:
    """I^mu applied to t^(A-I), evaluated at x: Gamma(A) Gamma^-1(A + mu I) x^(A + (mu-1)I)."""
    A = as_matrix(A, "A")
    mu = _order(mu).mu
    x = _positive(x)
    b = spectral_bounds(A).beta
    if not b > 0:
        raise PreconditionError(f"A must be positive stable (min Re eigenvalue {b:.6g})")
    I = eye(A.shape[0])
    return gamma_m(A) @ rgamma_m(A + mu * I) @ matpow_base(x, A + (mu - 1) * I)


def _check_frac_hypotheses(params: ParameterSet, j: int, opts: SeriesOptions) -> None:
    if not 1 <= j <= params.q:
        raise IndexError(f"D index {j} out of range 1..{params.q}")
    Dj = params.D[j - 1]
    for k, Dk in enumerate(params.D, start=1):
        c = commutator_norm(Dj, Dk)
        if c > opts.commutator_tol:
            raise PreconditionError(f"D_{j} and D_{k} do not commute ({c:.2e})")
    b = spectral_bounds(Dj).beta
    if not b > 0:
        raise PreconditionError(f"D_{j} must be positive stable (min Re eigenvalue {b:.6g})")


def weighted_value(params: ParameterSet, j: int, x: float, opts: SeriesOptions | None = None) -> np.ndarray:
    """R(x) x^(D_j - I)."""
    x = _positive(x)
    Dj = params.D[j - 1]
    return series.eval(params, x, opts).value @ matpow_base(x, Dj - eye(params.r))


def frac_integral(params: ParameterSet, j: int, mu, x: float, opts: SeriesOptions | None = None) -> np.ndarray:
    """Closed-form I^mu [R(z) z^(D_j - I)] at z = x."""
    opts = opts or SeriesOptions()
    mu = _order(mu).mu
    x = _positive(x)
    _check_frac_hypotheses(params, j, opts)
    Dj = params.D[j - 1]
    I = eye(params.r)
    R = series.eval(shift(params, "D", j, mu), x, opts).value
    return R @ matpow_base(x, Dj + (mu - 1) * I) @ gamma_m(Dj) @ rgamma_m(Dj + mu * I)


def frac_derivative(params: ParameterSet, j: int, mu, x: float, opts: SeriesOptions | None = None) -> np.ndarray:
    """Closed-form D^mu [R(z) z^(D_j - I)] at z = x."""
    opts = opts or SeriesOptions()
    mu = _order(mu).mu
    x = _positive(x)
    _check_frac_hypotheses(params, j, opts)
    Dj = params.D[j - 1]
    I = eye(params.r)
    R = series.eval(shift(params, "D", j, -mu), x, opts).value
    return R @ matpow_base(x, Dj - (mu + 1) * I) @ gamma_m(Dj) @ rgamma_m(Dj - mu * I)


def _rl_sum(f, mu: complex, x: float, n_nodes: int, grading: int) -> np.ndarray:
    # t = x u^m turns an endpoint factor t^g into u^(m(g+1)-1)
    m = grading
    q = jacobi_rule(0.0, mu.real - 1.0, n_nodes)
    u, one_minus_u = q.nodes, q.complements
    geom = sum(u**k for k in range(m))  # (1 - u^m) / (1 - u)
    smooth = m * u ** (m - 1) * geom ** (mu - 1)
    if mu.imag:
        smooth = smooth * np.exp(1j * mu.imag * np.log(one_minus_u))
    vals = np.stack([np.asarray(f(x * float(ui) ** m), dtype=complex) for ui in u])
    factor = x**mu / scipy.special.gamma(mu)
    return factor * np.tensordot(q.weights * smooth, vals, axes=(0, 0))


def rl_quad_oracle(
    f: Callable[[float], np.ndarray],
    mu,
    x: float,
    n_nodes: int = 128,
    grading: int = 8,
    tol: float | None = 1e-8,
) -> np.ndarray:
    """(1/Gamma(mu)) int_0^x (x-t)^(mu-1) f(t) dt by Gauss-Jacobi quadrature.

    The kernel singularity sits in the Jacobi weight; an algebraic singularity
    of f at t = 0 is smoothed by the substitution t = x u^grading. With
    ``tol`` set, the node count is doubled once and AccuracyError raised if the
    relative change exceeds ``tol``.
    """
    mu = _order(mu).mu
    x = _positive(x)
    value = _rl_sum(f, mu, x, n_nodes, grading)
    if tol is not None:
        finer = _rl_sum(f, mu, x, 2 * n_nodes, grading)
        change = fro_norm(finer - value) / max(1e-300, fro_norm(finer))
        if change > tol:
            raise AccuracyError(f"fractional quadrature not converged ({change:.3e} > {tol:g})")
        return finer
    return value


def frac_integral_oracle(params: ParameterSet, j: int, mu, x: float, opts: SeriesOptions | None = None, n_nodes: int = 128) -> np.ndarray:
    """I^mu [R z^(D_j - I)] at x by direct quadrature of the weighted function."""
    opts = opts or SeriesOptions()
    x = _positive(x)
    Dj = params.D[j - 1]
    I = eye(params.r)
    coeffs = series.coefficients(params, x, opts)

    def weighted(t):
        return series.polyval_matrix(coeffs, np.array([t]))[0] @ matpow_base(t, Dj - I)

    return rl_quad_oracle(weighted, mu, x, n_nodes)


def frac_derivative_oracle(params: ParameterSet, j: int, mu, x: float, opts: SeriesOptions | None = None, n_nodes: int = 128) -> np.ndarray:
    """D^mu [R z^(D_j - I)] at x as I^(n - mu) of the n-th ordinary derivative.

    The n-th derivative is taken term by term. This composition equals the
    closed form only when every exponent of the weighted function exceeds
    n - 1, i.e. min Re eigenvalue of D_j > n.
    """
    opts = opts or SeriesOptions()
    order = _order(mu)
    x = _positive(x)
    n = order.n_ceil
    rest = n - order.mu

    def nth(t):
        return relations.weighted_Dj_derivative(params, t, j, n, opts)

    if rest == 0:
        return nth(x)
    return rl_quad_oracle(nth, rest, x, n_nodes)
