"""Contiguous relations and differential formulas of pRq, checked numerically.

Every ``check_*`` function builds both sides of one identity independently:
the left side by term-wise operations on the series, the right side from
shifted evaluations. The commutation hypotheses of each identity are tested
first. With ``strict=True`` a violation raises; otherwise the report is
produced anyway and flagged ``hypotheses_met=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from . import series
from .errors import DomainError, PreconditionError
from .gammakit import pochhammer, spectral_bounds
from .matcore import commutator_norm, eye, fro_norm, matpow_base
from .series import ParameterSet, SeriesOptions, shift

IDENTITY_IDS = (
    "ThetaCi",
    "ThetaDj",
    "Bilateral",
    "SimpleCi",
    "SimpleDj",
    "DerivR",
    "DerivWeightDj",
    "DerivWeightCi",
    "ZADeriv",
)


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    lhs: Optional[np.ndarray]
    rhs: Optional[np.ndarray]
    residual: float
    hypotheses_met: bool = True
    note: str = ""
    z: complex = 0j
    index: tuple = ()

    @property
    def skipped(self) -> bool:
        return self.lhs is None

    @property
    def label(self) -> str:
        if not self.index:
            return self.identity_id
        return f"{self.identity_id}({','.join(str(i) for i in self.index)})"


def _residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return fro_norm(lhs - rhs) / max(1.0, fro_norm(lhs))


def _hypotheses(pairs, opts: SeriesOptions, strict: bool, extra: Iterable[str] = ()) -> tuple[bool, str]:
    unmet = list(extra)
    for X, Y, what in pairs:
        c = commutator_norm(X, Y)
        if c > opts.commutator_tol:
            unmet.append(f"{what} do not commute ({c:.2e})")
    if unmet and strict:
        raise PreconditionError("; ".join(unmet))
    return not unmet, "; ".join(unmet)


def _c_pairs(params: ParameterSet, i: int, all_c: bool = False):
    Ci = params.C[i - 1]
    pairs = [(Ci, params.A, f"C_{i} and A"), (Ci, params.B, f"C_{i} and B")]
    others = range(1, params.p + 1) if all_c else range(1, i)
    pairs += [(Ci, params.C[k - 1], f"C_{i} and C_{k}") for k in others if k != i]
    return pairs


def _d_pairs(params: ParameterSet, j: int, all_d: bool = False):
    Dj = params.D[j - 1]
    others = range(1, params.q + 1) if all_d else range(j + 1, params.q + 1)
    return [(Dj, params.D[k - 1], f"D_{j} and D_{k}") for k in others if k != j]


def _check_index(n: int, size: int, family: str, lowest: int = 1) -> None:
    if not lowest <= n <= size:
        raise IndexError(f"{family} index {n} out of range {lowest}..{size}")


def _positive_real(z) -> float:
    z = complex(z)
    if z.imag != 0 or not z.real > 0:
        raise DomainError(f"matrix powers of z need real z > 0, got {z}")
    return z.real


def _R(params, z, opts) -> np.ndarray:
    return series.eval(params, z, opts).value


# --------------------------------------------------------------------------
# term-wise left-hand sides


def theta_R(params: ParameterSet, z: complex, opts: SeriesOptions | None = None) -> np.ndarray:
    """(z d/dz) R as sum_n n T_n(z)."""
    z = complex(z)
    return series.accumulate(params, lambda n, U: n * U * z**n, opts).value


def derivative_R(params: ParameterSet, z: complex, order: int = 1, opts: SeriesOptions | None = None) -> np.ndarray:
    """(d/dz)^order R by term-wise differentiation."""
    z = complex(z)

    def term(n, U):
        if n < order:
            return np.zeros_like(U)
        return math.perm(n, order) * U * z ** (n - order)

    return series.accumulate(params, term, opts, min_terms=order + 1).value


def weighted_Dj_derivative(params: ParameterSet, z: float, j: int, order: int = 1, opts: SeriesOptions | None = None) -> np.ndarray:
    """(d/dz)^order [R(z) z^(D_j - I)] by term-wise differentiation (z > 0)."""
    x = _positive_real(z)
    _check_index(j, params.q, "D")
    Dj = params.D[j - 1]
    I = eye(params.r)

    def term(n, U):
        F = I
        for k in range(order):
            F = F @ (Dj + (n - 1 - k) * I)
        return U @ F * x**n

    total = series.accumulate(params, term, opts, min_terms=order + 1).value
    return total @ matpow_base(x, Dj - (order + 1) * I)


def weighted_Ci_derivative(
    params: ParameterSet, z: float, i: int, order: int = 1, opts: SeriesOptions | None = None, displayed_weight: bool = False
) -> np.ndarray:
    """(z^2 d/dz)^order [z^W R(z)] term-wise, W = C_i (or C_i - (order-1)I if ``displayed_weight``)."""
    x = _positive_real(z)
    _check_index(i, params.p, "C")
    Ci = params.C[i - 1]
    I = eye(params.r)
    s = -(order - 1) if displayed_weight else 0
    # z^2 d/dz maps z^(W + mI) to (W + mI) z^(W + (m+1)I)

    def term(n, U):
        return pochhammer(Ci + (n + s) * I, order) @ U * x**n

    total = series.accumulate(params, term, opts, min_terms=order + 1).value
    return matpow_base(x, Ci + (s + order) * I) @ total


# --------------------------------------------------------------------------
# identity checks


def check_theta_Ci(i: int, params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """(theta + C_i) R = C_i R(C_i+)."""
    opts = opts or SeriesOptions()
    _check_index(i, params.p, "C")
    ok, note = _hypotheses(_c_pairs(params, i), opts, strict)
    Ci = params.C[i - 1]
    lhs = theta_R(params, z, opts) + Ci @ _R(params, z, opts)
    rhs = Ci @ _R(shift(params, "C", i, 1), z, opts)
    return IdentityReport("ThetaCi", lhs, rhs, _residual(lhs, rhs), ok, note, complex(z), (i,))


def check_theta_Dj(j: int, params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """theta R + R (D_j - I) = R(D_j-) (D_j - I)."""
    opts = opts or SeriesOptions()
    _check_index(j, params.q, "D")
    ok, note = _hypotheses(_d_pairs(params, j), opts, strict)
    Dm = params.D[j - 1] - eye(params.r)
    lhs = theta_R(params, z, opts) + _R(params, z, opts) @ Dm
    rhs = _R(shift(params, "D", j, -1), z, opts) @ Dm
    return IdentityReport("ThetaDj", lhs, rhs, _residual(lhs, rhs), ok, note, complex(z), (j,))


def check_bilateral(i: int, j: int, params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """C_i R - R (D_j - I) = C_i R(C_i+) - R(D_j-) (D_j - I)."""
    opts = opts or SeriesOptions()
    _check_index(i, params.p, "C")
    _check_index(j, params.q, "D")
    ok, note = _hypotheses(_c_pairs(params, i) + _d_pairs(params, j), opts, strict)
    Ci = params.C[i - 1]
    Dm = params.D[j - 1] - eye(params.r)
    R = _R(params, z, opts)
    lhs = Ci @ R - R @ Dm
    rhs = Ci @ _R(shift(params, "C", i, 1), z, opts) - _R(shift(params, "D", j, -1), z, opts) @ Dm
    return IdentityReport("Bilateral", lhs, rhs, _residual(lhs, rhs), ok, note, complex(z), (i, j))


def check_simple_Ci(i: int, params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """(C_1 - C_i) R = C_1 R(C_1+) - C_i R(C_i+), for i >= 2."""
    opts = opts or SeriesOptions()
    _check_index(i, params.p, "C", lowest=2)
    ok, note = _hypotheses(_c_pairs(params, 1) + _c_pairs(params, i), opts, strict)
    C1, Ci = params.C[0], params.C[i - 1]
    lhs = (C1 - Ci) @ _R(params, z, opts)
    rhs = C1 @ _R(shift(params, "C", 1, 1), z, opts) - Ci @ _R(shift(params, "C", i, 1), z, opts)
    return IdentityReport("SimpleCi", lhs, rhs, _residual(lhs, rhs), ok, note, complex(z), (i,))


def check_simple_Dj(j: int, params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """C_1 R - R (D_j - I) = C_1 R(C_1+) - R(D_j-) (D_j - I)."""
    report = check_bilateral(1, j, params, z, opts, strict)
    return replace(report, identity_id="SimpleDj", index=(j,))


def deriv_formula(params: ParameterSet, z: complex, order: int = 1, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """(d/dz)^r R = (C_1)_r..(C_p)_r R(C+rI; D+rI | A, rA+B) (D_1)_r^-1..(D_q)_r^-1."""
    opts = opts or SeriesOptions()
    if order < 1:
        raise DomainError("derivative order must be >= 1")
    pairs = []
    for i in range(1, params.p + 1):
        pairs += _c_pairs(params, i, all_c=True)
    for j in range(1, params.q + 1):
        pairs += _d_pairs(params, j, all_d=True)
    ok, note = _hypotheses(pairs, opts, strict)
    I = eye(params.r)
    lhs = derivative_R(params, z, order, opts)
    shifted = ParameterSet(
        params.A,
        order * params.A + params.B,
        tuple(c + order * I for c in params.C),
        tuple(d + order * I for d in params.D),
    )
    rhs = _R(shifted, z, opts)
    for c in reversed(params.C):
        rhs = pochhammer(c, order) @ rhs
    for d in params.D:
        rhs = rhs @ np.linalg.inv(pochhammer(d, order))
    return IdentityReport("DerivR", lhs, rhs, _residual(lhs, rhs), ok, note, complex(z), (order,))


def deriv_weighted_Dj(params: ParameterSet, z: float, j: int, order: int = 1, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """(d/dz)^r [R z^(D_j-I)] = R(D_j - rI) (-1)^r z^(D_j-(r+1)I) (I - D_j)_r."""
    opts = opts or SeriesOptions()
    x = _positive_real(z)
    _check_index(j, params.q, "D")
    ok, note = _hypotheses(_d_pairs(params, j, all_d=True), opts, strict)
    Dj = params.D[j - 1]
    I = eye(params.r)
    lhs = weighted_Dj_derivative(params, x, j, order, opts)
    rhs = (-1) ** order * _R(shift(params, "D", j, -order), x, opts) @ matpow_base(x, Dj - (order + 1) * I) @ pochhammer(I - Dj, order)
    return IdentityReport("DerivWeightDj", lhs, rhs, _residual(lhs, rhs), ok, note, complex(x), (j, order))


def deriv_weighted_Ci(
    params: ParameterSet,
    z: float,
    i: int,
    order: int = 1,
    opts: SeriesOptions | None = None,
    strict: bool = True,
    displayed_weight: bool = False,
) -> IdentityReport:
    """(z^2 d/dz)^r [z^(C_i) R] = (C_i)_r z^(C_i+rI) R(C_i + rI).

    The weight z^(C_i - (r-1)I) is the one that makes the r = 1 case read as
    in the literature; it only agrees with z^(C_i) at r = 1.
    ``displayed_weight=True`` uses it anyway, to expose the mismatch.
    """
    opts = opts or SeriesOptions()
    x = _positive_real(z)
    _check_index(i, params.p, "C")
    ok, note = _hypotheses(_c_pairs(params, i, all_c=True), opts, strict)
    Ci = params.C[i - 1]
    I = eye(params.r)
    lhs = weighted_Ci_derivative(params, x, i, order, opts, displayed_weight)
    rhs = pochhammer(Ci, order) @ matpow_base(x, Ci + order * I) @ _R(shift(params, "C", i, order), x, opts)
    return IdentityReport("DerivWeightCi", lhs, rhs, _residual(lhs, rhs), ok, note, complex(x), (i, order))


def check_zA_deriv(params: ParameterSet, z: complex, opts: SeriesOptions | None = None, strict: bool = True) -> IdentityReport:
    """z A (d/dz) R = R(A, B-I) - (B-I) R, for AB = BA."""
    opts = opts or SeriesOptions()
    extra = []
    if not spectral_bounds(params.A).beta > 0:
        extra.append("A is not positive stable")
    if not spectral_bounds(params.B - eye(params.r)).beta > 0:
        extra.append("B-I is not positive stable")
    ok, note = _hypotheses([(params.A, params.B, "A and B")], opts, strict, extra)
    Bm = params.B - eye(params.r)
    lhs = params.A @ theta_R(params, z, opts)
    rhs = _R(shift(params, "B", None, -1), z, opts) - Bm @ _R(params, z, opts)
    return IdentityReport("ZADeriv", lhs, rhs, _residual(lhs, rhs), ok, note, complex(z), ())


# --------------------------------------------------------------------------
# suites


def run_suite(
    params: ParameterSet,
    z: complex,
    identities: Iterable[str] = IDENTITY_IDS,
    order: int = 1,
    opts: SeriesOptions | None = None,
    strict: bool = False,
) -> list[IdentityReport]:
    """All applicable instances of the requested identities at one point.

    Identities involving matrix powers of z are reported as skipped unless
    z is real and positive.
    """
    opts = opts or SeriesOptions()
    z = complex(z)
    wanted = list(identities)
    unknown = [w for w in wanted if w not in IDENTITY_IDS]
    if unknown:
        raise ValueError(f"unknown identities: {', '.join(unknown)}")
    positive = z.imag == 0 and z.real > 0
    out: list[IdentityReport] = []
    P, Q = range(1, params.p + 1), range(1, params.q + 1)
    for name in IDENTITY_IDS:
        if name not in wanted:
            continue
        if name == "ThetaCi":
            out += [check_theta_Ci(i, params, z, opts, strict) for i in P]
        elif name == "ThetaDj":
            out += [check_theta_Dj(j, params, z, opts, strict) for j in Q]
        elif name == "Bilateral":
            out += [check_bilateral(i, j, params, z, opts, strict) for i in P for j in Q]
        elif name == "SimpleCi":
            out += [check_simple_Ci(i, params, z, opts, strict) for i in P if i >= 2]
        elif name == "SimpleDj":
            out += [check_simple_Dj(j, params, z, opts, strict) for j in Q if params.p >= 1]
        elif name == "DerivR":
            out.append(deriv_formula(params, z, order, opts, strict))
        elif name == "DerivWeightDj":
            for j in Q:
                if positive:
                    out.append(deriv_weighted_Dj(params, z.real, j, order, opts, strict))
                else:
                    out.append(IdentityReport(name, None, None, math.nan, True, "skipped: needs real z > 0", z, (j, order)))
        elif name == "DerivWeightCi":
            for i in P:
                if positive:
                    out.append(deriv_weighted_Ci(params, z.real, i, order, opts, strict))
                else:
                    out.append(IdentityReport(name, None, None, math.nan, True, "skipped: needs real z > 0", z, (i, order)))
        elif name == "ZADeriv":
            out.append(check_zA_deriv(params, z, opts, strict))
    return out
