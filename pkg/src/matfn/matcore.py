"""Dense complex matrix helpers and matrix functional calculus.

``matfun`` applies a scalar analytic function to a square matrix. Well
conditioned diagonalizable inputs go through the eigendecomposition; the
rest go through a blocked Schur-Parlett recurrence (Davies & Higham), with
the diagonal blocks evaluated from Taylor series about the cluster mean.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np
import scipy.linalg

from .errors import DomainError, NumericError

DEFAULT_TOL = 1e-10
COND_THRESHOLD = 1e6
CLUSTER_DELTA = 0.1


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a square complex128 array, rejecting NaN/Inf."""
    X = np.array(M, dtype=complex)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DomainError(f"{name} has non-finite entries")
    return X


def eye(r: int) -> np.ndarray:
    return np.eye(r, dtype=complex)


def fro_norm(M) -> float:
    return float(np.linalg.norm(M, "fro"))


def two_norm_estimate(M) -> float:
    """Spectral norm; exact via SVD at the matrix sizes used here."""
    return float(np.linalg.norm(np.asarray(M, dtype=complex), 2))


def is_close(X, Y, tol: float = DEFAULT_TOL) -> bool:
    return fro_norm(np.asarray(X) - np.asarray(Y)) <= tol * max(1.0, fro_norm(X))


def rel_diff(X, Y) -> float:
    """Frobenius distance scaled by max(1, |X|)."""
    return fro_norm(np.asarray(X) - np.asarray(Y)) / max(1.0, fro_norm(X))


def commutator_norm(X, Y) -> float:
    """Relative commutator size |XY - YX| / (|X| |Y|); zero if either is zero."""
    nx, ny = fro_norm(X), fro_norm(Y)
    if nx == 0.0 or ny == 0.0:
        return 0.0
    return fro_norm(X @ Y - Y @ X) / (nx * ny)


def commutes(X, Y, tol: float = DEFAULT_TOL) -> bool:
    return commutator_norm(X, Y) <= tol


def is_diagonal(M: np.ndarray) -> bool:
    return not np.any(M - np.diag(np.diag(M)))


# --------------------------------------------------------------------------
# scalar functions


class ScalarFunction:
    """A scalar analytic function usable by :func:`matfun`.

    Subclasses provide vectorized values and Taylor coefficients; the latter
    are only needed on the Schur-Parlett path.
    """

    name = "f"

    def value(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def taylor(self, center: complex, order: int) -> np.ndarray:
        """Coefficients c_0..c_order of the expansion about ``center``."""
        # Cauchy integral on a circle of radius 1, discretized by the FFT.
        m = max(64, 2 * (order + 1))
        w = np.exp(2j * np.pi * np.arange(m) / m)
        vals = self.value(center + w)
        coeffs = np.fft.fft(vals) / m
        return coeffs[: order + 1]

    def __call__(self, z):
        return self.value(np.asarray(z, dtype=complex))


class _Callable(ScalarFunction):
    def __init__(self, fn: Callable, name: str = "f"):
        self.fn = fn
        self.name = name

    def value(self, z):
        return np.asarray(np.vectorize(self.fn, otypes=[complex])(z), dtype=complex)


class ExpScaled(ScalarFunction):
    """z -> exp(c z)."""

    def __init__(self, c: complex = 1.0):
        self.c = complex(c)
        self.name = "exp" if self.c == 1 else f"exp({self.c}*z)"

    def value(self, z):
        return np.exp(self.c * z)

    def taylor(self, center, order):
        k = np.arange(order + 1)
        fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
        return cmath.exp(self.c * center) * self.c ** k / fact


class Identity(ScalarFunction):
    name = "identity"

    def value(self, z):
        return np.array(z, dtype=complex)

    def taylor(self, center, order):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = center
        if order >= 1:
            c[1] = 1.0
        return c


def _mp_taylor(fn, center: complex, order: int) -> np.ndarray:
    with mpmath.workdps(30):
        cs = mpmath.taylor(fn, mpmath.mpc(center), order)
    return np.array([complex(c) for c in cs], dtype=complex)


def as_scalar_function(f) -> ScalarFunction:
    if isinstance(f, ScalarFunction):
        return f
    if callable(f):
        return _Callable(f, getattr(f, "__name__", "f"))
    raise TypeError(f"expected a ScalarFunction or callable, got {type(f).__name__}")


# --------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class SpectralDecomposition:
    """Either M = V diag(eigenvalues) V^-1 or M = Q T Q^H (Schur)."""

    kind: str  # "diagonalizable" | "triangular"
    eigenvalues: np.ndarray
    cond: float
    V: Optional[np.ndarray] = None
    Vinv: Optional[np.ndarray] = None
    Q: Optional[np.ndarray] = None
    T: Optional[np.ndarray] = None

    def reconstruct(self) -> np.ndarray:
        if self.kind == "diagonalizable":
            return (self.V * self.eigenvalues) @ self.Vinv
        return self.Q @ self.T @ self.Q.conj().T


def decompose(M, cond_threshold: float = COND_THRESHOLD, name: str = "matrix") -> SpectralDecomposition:
    M = as_matrix(M, name)
    r = M.shape[0]
    if is_diagonal(M):
        lam = np.diag(M).copy()
        return SpectralDecomposition("diagonalizable", lam, 1.0, V=eye(r), Vinv=eye(r))
    try:
        lam, V = np.linalg.eig(M)
        cond = float(np.linalg.cond(V))
        if np.isfinite(cond) and cond < cond_threshold:
            Vinv = np.linalg.inv(V)
            # geev balancing can go wrong on badly scaled (e.g. subnormal) entries
            resid = fro_norm((V * lam) @ Vinv - M)
            if resid <= 1e-10 * cond * max(fro_norm(M), np.finfo(float).tiny):
                return SpectralDecomposition("diagonalizable", lam, cond, V=V, Vinv=Vinv)
        T, Q = scipy.linalg.schur(M, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"eigen-solver failed on {name}: {exc}") from exc
    return SpectralDecomposition("triangular", np.diag(T).copy(), cond, Q=Q, T=T)


def eigenvalues(M) -> np.ndarray:
    M = as_matrix(M)
    if is_diagonal(M):
        return np.diag(M).copy()
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigen-solver failed: {exc}") from exc


def simultaneous_diagonalization(X, Y, tol: float = DEFAULT_TOL):
    """Common eigenbasis of two commuting diagonalizable matrices.

    Returns ``(V, Vinv, x, y)`` with X = V diag(x) V^-1 and Y = V diag(y) V^-1,
    or None when the matrices do not commute or no well conditioned common
    basis is found.
    """
    X = as_matrix(X)
    Y = as_matrix(Y)
    r = X.shape[0]
    if is_diagonal(X) and is_diagonal(Y):
        return eye(r), eye(r), np.diag(X).copy(), np.diag(Y).copy()
    if not commutes(X, Y, tol):
        return None
    # generic combination separates eigenvalues shared by one of the two
    xi = 0.6180339887498949 + 0.2360679774997897j
    dec = decompose(X + xi * Y)
    if dec.kind != "diagonalizable":
        return None
    V, Vinv = dec.V, dec.Vinv
    Xd = Vinv @ X @ V
    Yd = Vinv @ Y @ V
    x = np.diag(Xd).copy()
    y = np.diag(Yd).copy()
    scale = dec.cond * tol * 100
    if fro_norm(Xd - np.diag(x)) > scale * max(1.0, fro_norm(X)):
        return None
    if fro_norm(Yd - np.diag(y)) > scale * max(1.0, fro_norm(Y)):
        return None
    return V, Vinv, x, y


# --------------------------------------------------------------------------
# functional calculus


def _check_finite(values: np.ndarray, lam: np.ndarray, fname: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        offending = ", ".join(f"{complex(v):.6g}" for v in lam[bad])
        raise DomainError(f"{fname} is undefined at eigenvalue(s) {offending}")


def matfun(M, f, cond_threshold: float = COND_THRESHOLD, decomposition: SpectralDecomposition | None = None) -> np.ndarray:
    """Evaluate f(M) for a scalar analytic ``f``."""
    f = as_scalar_function(f)
    dec = decomposition if decomposition is not None else decompose(M, cond_threshold)
    if dec.kind == "diagonalizable":
        fv = f.value(dec.eigenvalues)
        _check_finite(fv, dec.eigenvalues, f.name)
        return (dec.V * fv) @ dec.Vinv
    return _schur_parlett(dec.Q, dec.T, f)


def _clusters(lam: np.ndarray, delta: float) -> list[int]:
    n = len(lam)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) <= delta:
                parent[find(i)] = find(j)
    order: dict[int, int] = {}
    labels = []
    for i in range(n):
        root = find(i)
        labels.append(order.setdefault(root, len(order)))
    return labels


def _swap(T: np.ndarray, Q: np.ndarray, k: int) -> None:
    """Exchange diagonal entries k and k+1 of the triangular T in place."""
    a, b, c = T[k, k], T[k, k + 1], T[k + 1, k + 1]
    v = np.array([b, c - a])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return
    v = v / nv
    G = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]])
    T[:, k : k + 2] = T[:, k : k + 2] @ G
    T[k : k + 2, :] = G.conj().T @ T[k : k + 2, :]
    Q[:, k : k + 2] = Q[:, k : k + 2] @ G
    T[k + 1, k] = 0.0


def _taylor_block(Tb: np.ndarray, f: ScalarFunction) -> np.ndarray:
    s = Tb.shape[0]
    lam = np.diag(Tb)
    if s == 1:
        val = f.value(lam)
        _check_finite(val, lam, f.name)
        return val.reshape(1, 1)
    sigma = complex(np.mean(lam))
    N = Tb - sigma * np.eye(s)
    # nearly nilpotent N needs few terms; high-order coefficients can be costly
    for max_order in (2 * s + 8, 80):
        F = _taylor_sum(N, f, sigma, max_order)
        if F is not None:
            return F
    raise NumericError(f"Taylor expansion of {f.name} did not converge on a clustered block")


def _taylor_sum(N: np.ndarray, f: ScalarFunction, sigma: complex, max_order: int):
    s = N.shape[0]
    coeffs = f.taylor(sigma, max_order)
    _check_finite(coeffs[:1], np.array([sigma]), f.name)
    F = coeffs[0] * np.eye(s, dtype=complex)
    P = np.eye(s, dtype=complex)
    small = 0
    for k in range(1, max_order + 1):
        P = P @ N
        term = coeffs[k] * P
        if not np.all(np.isfinite(term)):
            raise NumericError(f"Taylor expansion of {f.name} overflowed on a clustered block")
        F = F + term
        if fro_norm(term) <= 1e-16 * max(1.0, fro_norm(F)):
            small += 1
            if k >= s and small >= s:
                return F
        else:
            small = 0
    return None


def _schur_parlett(Q: np.ndarray, T: np.ndarray, f: ScalarFunction, delta: float = CLUSTER_DELTA) -> np.ndarray:
    T = T.copy()
    Q = Q.copy()
    labels = _clusters(np.diag(T), delta)
    # bubble the Schur form into contiguous cluster blocks
    changed = True
    while changed:
        changed = False
        for k in range(len(labels) - 1):
            if labels[k] > labels[k + 1]:
                _swap(T, Q, k)
                labels[k], labels[k + 1] = labels[k + 1], labels[k]
                changed = True
    bounds = [0]
    for k in range(1, len(labels)):
        if labels[k] != labels[k - 1]:
            bounds.append(k)
    bounds.append(len(labels))
    blocks = [slice(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    nb = len(blocks)
    F = np.zeros_like(T)
    for b in blocks:
        F[b, b] = _taylor_block(T[b, b], f)
    for d in range(1, nb):
        for i in range(nb - d):
            j = i + d
            bi, bj = blocks[i], blocks[j]
            rhs = F[bi, bi] @ T[bi, bj] - T[bi, bj] @ F[bj, bj]
            for k in range(i + 1, j):
                bk = blocks[k]
                rhs = rhs + F[bi, bk] @ T[bk, bj] - T[bi, bk] @ F[bk, bj]
            F[bi, bj] = scipy.linalg.solve_sylvester(T[bi, bi], -T[bj, bj], rhs)
    return Q @ F @ Q.conj().T


def matpow_base(t: float, A) -> np.ndarray:
    """t**A = exp(ln(t) A) for real t > 0."""
    A = as_matrix(A, "exponent")
    if not (isinstance(t, (int, float, np.floating, np.integer)) and t > 0):
        raise DomainError(f"matpow_base needs a positive real base, got {t!r}")
    if t == 1:
        return eye(A.shape[0])
    return matfun(A, ExpScaled(math.log(t)))


def eigenprojectors(M, cond_threshold: float = COND_THRESHOLD):
    """Eigenvalues and rank-one spectral projectors of a diagonalizable M.

    Returns None when M is not (well conditioned) diagonalizable.
    """
    dec = decompose(M, cond_threshold)
    if dec.kind != "diagonalizable":
        return None
    projs = [np.outer(dec.V[:, k], dec.Vinv[k, :]) for k in range(len(dec.eigenvalues))]
    return dec.eigenvalues, projs

