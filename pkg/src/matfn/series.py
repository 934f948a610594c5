"""Evaluation of pRq(A, B; z) by its power series, plus convergence classification.

A single term is

    Gamma^-1(nA+B) (C_1)_n ... (C_p)_n (D_1)_n^-1 ... (D_q)_n^-1 z^n / n!

with the factors multiplied in exactly this order. Pochhammer products are
carried as (unit-norm matrix, log scale) pairs so that (C)_n and n! can grow
past the double range while their ratio stays representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import NumericError, PreconditionError
from .gammakit import RGAMMA, ScaledReciprocalGammaFunction, rgamma_log_shift, rgamma_m, rgamma_m_scaled, spectral_bounds
from .matcore import DEFAULT_TOL, as_matrix, eye, fro_norm, simultaneous_diagonalization


@dataclass(frozen=True)
class ParameterSet:
    """Matrices (A, B, C_1..C_p, D_1..D_q) of one pRq instance, all r x r."""

    A: np.ndarray
    B: np.ndarray
    C: tuple = ()
    D: tuple = ()

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        r = A.shape[0]
        B = as_matrix(self.B, "B")
        C = tuple(as_matrix(c, f"C_{i + 1}") for i, c in enumerate(self.C))
        D = tuple(as_matrix(d, f"D_{j + 1}") for j, d in enumerate(self.D))
        for name, M in [("B", B)] + [(f"C_{i + 1}", c) for i, c in enumerate(C)] + [(f"D_{j + 1}", d) for j, d in enumerate(D)]:
            if M.shape != (r, r):
                raise PreconditionError(f"{name} has shape {M.shape}, expected {(r, r)}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def p(self) -> int:
        return len(self.C)

    @property
    def q(self) -> int:
        return len(self.D)

    @property
    def r(self) -> int:
        return self.A.shape[0]

    def transform(self, fn: Callable[[np.ndarray], np.ndarray]) -> "ParameterSet":
        """Apply ``fn`` to every matrix, e.g. a similarity S X S^-1."""
        return ParameterSet(fn(self.A), fn(self.B), tuple(fn(c) for c in self.C), tuple(fn(d) for d in self.D))

    @classmethod
    def scalar(cls, a, b, c=(), d=()) -> "ParameterSet":
        return cls(np.array([[a]]), np.array([[b]]), tuple(np.array([[x]]) for x in c), tuple(np.array([[x]]) for x in d))


@dataclass(frozen=True)
class SeriesOptions:
    rel_tol: float = 1e-12
    max_terms: int = 500
    commutator_tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


class Verdict(str, Enum):
    ALL_FINITE_Z = "AllFiniteZ"
    INSIDE_UNIT_DISK = "InsideUnitDisk"
    BOUNDARY_ABSOLUTE = "BoundaryAbsolute"
    BOUNDARY_UNDETERMINED = "BoundaryUndetermined"
    DIVERGES_OUTSIDE_DISK = "DivergesOutsideDisk"
    DIVERGES_ALL_NONZERO = "DivergesAllNonzero"

    def __str__(self):
        return self.value


DIVERGENT = (Verdict.DIVERGES_OUTSIDE_DISK, Verdict.DIVERGES_ALL_NONZERO)


@dataclass(frozen=True)
class ConvergenceVerdict:
    tag: Verdict
    detail: Optional[float] = None  # sum beta(D_j) - sum alpha(C_i) when p = q + 2
    hypotheses_met: bool = True  # every parameter positive stable

    def __str__(self):
        if self.detail is None:
            return str(self.tag)
        return f"{self.tag}, margin={self.detail:.12g}"


@dataclass(frozen=True)
class EvalResult:
    value: np.ndarray
    terms_used: int
    last_term_norm: float
    verdict: Optional[ConvergenceVerdict] = None
    terminated_polynomially: bool = False
    truncated: bool = False


def classify(params: ParameterSet, z: complex) -> ConvergenceVerdict:
    """Convergence region of the series for the given argument.

    Depends only on p, q, |z| and the spectra of the C_i and D_j.
    """
    p, q = params.p, params.q
    az = abs(complex(z))
    stable = all(spectral_bounds(M).beta > 0 for M in (params.A, params.B, *params.C, *params.D))
    if p <= q + 1:
        return ConvergenceVerdict(Verdict.ALL_FINITE_Z, None, stable)
    if p > q + 2:
        tag = Verdict.ALL_FINITE_Z if az == 0 else Verdict.DIVERGES_ALL_NONZERO
        return ConvergenceVerdict(tag, None, stable)
    margin = sum(spectral_bounds(d).beta for d in params.D) - sum(spectral_bounds(c).alpha for c in params.C)
    if abs(az - 1.0) <= 4 * np.finfo(float).eps:
        tag = Verdict.BOUNDARY_ABSOLUTE if margin > 0 else Verdict.BOUNDARY_UNDETERMINED
    elif az < 1:
        tag = Verdict.INSIDE_UNIT_DISK
    else:
        tag = Verdict.DIVERGES_OUTSIDE_DISK
    return ConvergenceVerdict(tag, float(margin), stable)


def growth_margin(params: ParameterSet) -> float:
    """1 + beta(A) + q - p: the n! exponent by which term sizes shrink.

    Gamma^-1(nA + B) decays like (n!)^(-beta(A)) while each Pochhammer ratio
    contributes n!^(+-1); a negative margin means the terms grow without
    bound for every z != 0, whatever the classifier's table says.
    """
    return 1.0 + spectral_bounds(params.A).beta + params.q - params.p


def _terminates(params: ParameterSet) -> bool:
    """Some (C_i)_n vanishes identically: C_i diagonalizable with nonpositive integer spectrum."""
    for C in params.C:
        lam = np.linalg.eigvals(C)
        if np.all(np.abs(lam - np.round(lam.real)) < 1e-12) and np.all(np.round(lam.real) <= 0):
            k = int(-np.round(lam.real).min())
            M = eye(params.r)
            for m in range(k + 1):
                M = M @ (C + m * eye(params.r))
            if fro_norm(M) <= 1e-12 * max(1.0, fro_norm(C)) ** (k + 1):
                return True
    return False


def shift(params: ParameterSet, which: str, index: int | None = None, by: complex = 1) -> ParameterSet:
    """Copy of ``params`` with one parameter moved by ``by`` * I.

    ``which`` is one of "A", "B", "C", "D"; C and D take a 1-based ``index``.
    """
    I = eye(params.r)
    if which in ("A", "B"):
        if index is not None:
            raise IndexError(f"{which} takes no index")
        return replace(params, **{which: getattr(params, which) + by * I})
    if which not in ("C", "D"):
        raise ValueError(f"unknown parameter family {which!r}")
    family = list(getattr(params, which))
    if index is None or not 1 <= index <= len(family):
        raise IndexError(f"{which} index {index} out of range 1..{len(family)}")
    family[index - 1] = family[index - 1] + by * I
    return replace(params, **{which: tuple(family)})


def _reciprocal_gamma_sequence(A: np.ndarray, B: np.ndarray) -> Callable[[int], tuple[np.ndarray, float]]:
    """n -> (M, s) with Gamma^-1(nA + B) = exp(s) M, reusing one eigenbasis when A and B commute."""
    common = simultaneous_diagonalization(A, B)
    if common is not None:
        V, Vinv, a, b = common

        def diag_path(n: int) -> tuple[np.ndarray, float]:
            lam = n * a + b
            s = rgamma_log_shift(lam)
            vals = RGAMMA.value(lam) if s == 0.0 else ScaledReciprocalGammaFunction(s).value(lam)
            return (V * vals) @ Vinv, s

        return diag_path
    return lambda n: rgamma_m_scaled(n * A + B)


class _Terms:
    """Iterator over the coefficient matrices U_n (term without z^n).

    Sets ``terminated`` when a numerator Pochhammer becomes the zero matrix,
    after which every later term vanishes.
    """

    def __init__(self, params: ParameterSet, opts: SeriesOptions):
        self.params = params
        self.opts = opts
        self.terminated = False

    def __iter__(self) -> Iterator[tuple[int, np.ndarray]]:
        P = self.params
        r = P.r
        I = eye(r)
        gamma_at = _reciprocal_gamma_sequence(P.A, P.B)
        C_mat = [I.copy() for _ in P.C]
        C_log = [0.0] * P.p
        D_mat = [I.copy() for _ in P.D]
        D_log = [0.0] * P.q
        log_fact = 0.0
        for n in range(self.opts.max_terms):
            M, log_gamma_scale = gamma_at(n)
            for Cn in C_mat:
                M = M @ Cn
            for Dn in D_mat:
                M = M @ Dn
            nrm = fro_norm(M)
            if nrm == 0.0:
                yield n, M
            else:
                log_size = sum(C_log) + sum(D_log) - log_fact + log_gamma_scale + math.log(nrm)
                if log_size > 700:
                    raise NumericError(f"series term {n} overflows (log size {log_size:.1f})")
                yield n, M / nrm * math.exp(log_size)

            for i, Ci in enumerate(P.C):
                nxt = C_mat[i] @ (Ci + n * I)
                nrm = fro_norm(nxt)
                if nrm <= 1e-300:
                    self.terminated = True
                    return
                C_mat[i] = nxt / nrm
                C_log[i] += math.log(nrm)
            for j, Dj in enumerate(P.D):
                X = Dj + n * I
                sv = np.linalg.svd(X, compute_uv=False)
                if not sv[-1] > 1e-12 * sv[0]:
                    raise PreconditionError(f"D_{j + 1} + {n}I is numerically singular")
                nxt = np.linalg.solve(X, D_mat[j])
                nrm = fro_norm(nxt)
                D_mat[j] = nxt / nrm
                D_log[j] += math.log(nrm)
            log_fact += math.log(n + 1)


@dataclass(frozen=True)
class _Sum:
    value: np.ndarray
    terms_used: int
    last_term_norm: float
    terminated_polynomially: bool
    truncated: bool


def accumulate(
    params: ParameterSet,
    contribution: Callable[[int, np.ndarray], np.ndarray],
    opts: SeriesOptions | None = None,
    min_terms: int = 0,
) -> _Sum:
    """Sum ``contribution(n, U_n)`` over the series with the standard stopping rule.

    Stops after three consecutive contributions with norm below
    rel_tol * max(1, |partial sum|) (not counted before ``min_terms`` terms),
    on polynomial termination, or at max_terms.
    """
    opts = opts or SeriesOptions()
    terms = _Terms(params, opts)
    total = np.zeros((params.r, params.r), dtype=complex)
    small = 0
    used = 0
    last = math.inf
    converged = False
    for n, U in terms:
        c = contribution(n, U)
        if not np.all(np.isfinite(c)):
            raise NumericError(f"series term {n} is not finite")
        total = total + c
        used = n + 1
        last = fro_norm(c)
        if used >= min_terms and last <= opts.rel_tol * max(1.0, fro_norm(total)):
            small += 1
            if small >= 3:
                converged = True
                break
        else:
            small = 0
    if terms.terminated:
        last = 0.0
    truncated = not converged and not terms.terminated
    return _Sum(total, used, last, terms.terminated, truncated)


def coefficients(params: ParameterSet, z: complex, opts: SeriesOptions | None = None) -> list[np.ndarray]:
    """Coefficient matrices U_0, U_1, ... with R(w) = sum U_n w^n for |w| <= |z|.

    Truncated by the same rule ``eval`` applies at ``z``.
    """
    z = complex(z)
    kept: list[np.ndarray] = []

    def record(n, U):
        kept.append(U)
        return U * z**n

    accumulate(params, record, opts)
    return kept


def polyval_matrix(coeffs: Sequence[np.ndarray], w: np.ndarray) -> np.ndarray:
    """Evaluate sum_n coeffs[n] w^n at each entry of ``w``; returns (len(w), r, r)."""
    w = np.asarray(w, dtype=complex)
    U = np.stack(coeffs)
    powers = w[:, None] ** np.arange(len(coeffs))[None, :]
    return np.einsum("mn,nij->mij", powers, U)


def eval(
    params: ParameterSet,
    z: complex,
    opts: SeriesOptions | None = None,
    allow_divergent: bool = False,
) -> EvalResult:
    """Value of pRq(A, B; z) by truncated summation.

    Raises PreconditionError in the divergent regions unless ``allow_divergent``.
    """
    z = complex(z)
    verdict = classify(params, z)
    if verdict.tag in DIVERGENT and not allow_divergent:
        raise PreconditionError(f"series diverges here ({verdict}); pass allow_divergent=True to sum anyway")
    margin = growth_margin(params)
    if margin < -1e-12 and z != 0 and not allow_divergent and not _terminates(params):
        raise PreconditionError(
            f"series diverges for every z != 0: 1 + beta(A) + q - p = {margin:.6g} < 0; pass allow_divergent=True to sum anyway"
        )
    if z == 0:
        # only the n = 0 term survives
        return EvalResult(rgamma_m(params.B), 1, 0.0, verdict)
    s = accumulate(params, lambda n, U: U * z**n, opts)
    return EvalResult(s.value, s.terms_used, s.last_term_norm, verdict, s.terminated_polynomially, s.truncated)


def value(params: ParameterSet, z: complex, opts: SeriesOptions | None = None) -> np.ndarray:
    """Shorthand for ``eval(...).value``."""
    return eval(params, z, opts).value

