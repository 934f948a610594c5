"""Euler-type integral representation of pRq and its cross-check against the series.

    pRq(A, B; z) = int_0^1  R'(t z) t^(C_p - I) (1-t)^(D_q - C_p - I) dt
                   * Gamma(D_q) Gamma^-1(C_p) Gamma^-1(D_q - C_p)

where R' is the (p-1, q-1) function that drops C_p and D_q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import series
from .errors import AccuracyError, PreconditionError
from .gammakit import gamma_m, rgamma_m, spectral_bounds
from .matcore import commutator_norm, fro_norm
from .quadrature import JacobiQuadRule, integrate_beta_kernel, jacobi_rule
from .series import ParameterSet, SeriesOptions

__all__ = ["JacobiQuadRule", "IntegralReport", "eval_integral", "integral_report", "jacobi_rule", "check_hypotheses"]


def inner_params(params: ParameterSet) -> ParameterSet:
    return ParameterSet(params.A, params.B, params.C[:-1], params.D[:-1])


def check_hypotheses(params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> list[str]:
    """List the violated hypotheses of the integral representation.

    Positive stability and |z| < 1 always raise; commutation failures raise
    only when ``strict``.
    """
    opts = opts or SeriesOptions()
    if params.p < 1 or params.q < 1:
        raise PreconditionError("integral representation needs p >= 1 and q >= 1")
    Cp, Dq = params.C[-1], params.D[-1]
    for M, label in ((Cp, "C_p"), (Dq, "D_q"), (Dq - Cp, "D_q - C_p")):
        b = spectral_bounds(M).beta
        if not b > 0:
            raise PreconditionError(f"{label} is not positive stable (min Re eigenvalue {b:.6g})")
    if not abs(complex(z)) < 1:
        raise PreconditionError(f"integral representation needs |z| < 1, got |z| = {abs(complex(z)):.6g}")
    unmet = []
    for j, Dj in enumerate(params.D, start=1):
        c = commutator_norm(Cp, Dj)
        if c > opts.commutator_tol:
            unmet.append(f"C_p and D_{j} do not commute ({c:.2e})")
    if unmet and strict:
        raise PreconditionError("; ".join(unmet))
    return unmet


def _integral(params: ParameterSet, z: complex, n_nodes: int, coeffs) -> np.ndarray:
    Cp, Dq = params.C[-1], params.D[-1]

    def inner_at(t):
        return series.polyval_matrix(coeffs, t * z)

    body = integrate_beta_kernel(Cp, Dq - Cp, n_nodes, left=inner_at)
    return body @ gamma_m(Dq) @ rgamma_m(Cp) @ rgamma_m(Dq - Cp)


def eval_integral(
    params: ParameterSet,
    z: complex,
    n_nodes: int = 128,
    opts: SeriesOptions | None = None,
    strict: bool = True,
    doubling_tol: float | None = 1e-8,
) -> np.ndarray:
    """pRq(A, B; z) from the integral representation with ``n_nodes`` Gauss-Jacobi nodes.

    The inner function is summed once into its coefficient matrices, then
    evaluated at t z for every node. With ``doubling_tol`` set, the result is
    compared against 2 * n_nodes and AccuracyError is raised when the relative
    change exceeds it.
    """
    opts = opts or SeriesOptions()
    z = complex(z)
    check_hypotheses(params, z, opts, strict)
    coeffs = series.coefficients(inner_params(params), z, opts)
    value = _integral(params, z, n_nodes, coeffs)
    if doubling_tol is not None:
        finer = _integral(params, z, 2 * n_nodes, coeffs)
        change = fro_norm(finer - value) / max(1.0, fro_norm(finer))
        if change > doubling_tol:
            raise AccuracyError(f"quadrature not converged: {n_nodes} -> {2 * n_nodes} nodes changed the value by {change:.3e}")
    return value


@dataclass(frozen=True)
class IntegralReport:
    z: complex
    series_value: np.ndarray
    integral_value: np.ndarray
    discrepancy: float  # relative Frobenius, series vs integral
    doubling_change: float  # relative Frobenius, n vs 2n nodes
    hypotheses_met: bool
    note: str = ""


def integral_report(
    params: ParameterSet,
    z: complex,
    n_nodes: int = 128,
    opts: SeriesOptions | None = None,
    strict: bool = False,
) -> IntegralReport:
    """Series value, integral value and both discrepancies at one point."""
    opts = opts or SeriesOptions()
    z = complex(z)
    unmet = check_hypotheses(params, z, opts, strict)
    coeffs = series.coefficients(inner_params(params), z, opts)
    coarse = _integral(params, z, n_nodes, coeffs)
    fine = _integral(params, z, 2 * n_nodes, coeffs)
    ref = series.eval(params, z, opts).value
    scale = max(1e-300, fro_norm(ref))
    return IntegralReport(
        z,
        ref,
        coarse,
        fro_norm(coarse - ref) / scale,
        fro_norm(fine - coarse) / max(1e-300, fro_norm(fine)),
        not unmet,
        "; ".join(unmet),
    )
