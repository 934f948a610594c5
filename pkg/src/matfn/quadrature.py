"""Gauss-Jacobi rules on (0, 1) and integrals against t^(X-I) (1-t)^(Y-I)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.special

from .errors import DomainError
from .matcore import as_matrix, decompose, eye, matpow_base


@dataclass(frozen=True)
class JacobiQuadRule:
    """Nodes/weights for the weight t^exponent_left (1-t)^exponent_right on (0, 1).

    ``complements`` holds 1 - node computed without cancellation.
    """

    exponent_left: float
    exponent_right: float
    nodes: np.ndarray
    weights: np.ndarray
    complements: np.ndarray

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Sum weights against samples stacked along the first axis."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def jacobi_rule(a: float, b: float, n_nodes: int) -> JacobiQuadRule:
    """Gauss rule exact for polynomials of degree <= 2n-1 against t^a (1-t)^b."""
    a = float(a)
    b = float(b)
    if not (a > -1 and b > -1):
        raise DomainError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")
    if n_nodes < 1:
        raise DomainError("n_nodes must be positive")
    # scipy's weight on (-1, 1) is (1-x)^alpha (1+x)^beta
    x, w = scipy.special.roots_jacobi(int(n_nodes), b, a)
    order = np.argsort(x)
    x, w = x[order], w[order]
    scale = 2.0 ** (a + b + 1)
    return JacobiQuadRule(a, b, (1.0 + x) / 2.0, w / scale, (1.0 - x) / 2.0)


# scipy's Gauss-Laguerre weights stop being finite a little beyond this
MAX_LAGUERRE_NODES = 320


@dataclass(frozen=True)
class SplitKernelRule:
    """Rule for t^(x-1) (1-t)^(y-1) on (0, 1) with complex x, y; the weights include the kernel.

    Each half of (0, 1) is mapped to (0, inf) by t = e^(-w)/2 (or 1 - t = e^(-w)/2),
    which turns the endpoint factor into e^(-x w): Gauss-Laguerre in w then
    integrates the oscillating part t^(i Im x) as a smooth function.
    """

    exponent_left: complex
    exponent_right: complex
    nodes: np.ndarray
    weights: np.ndarray
    complements: np.ndarray

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights, values, axes=(0, 0))


def split_kernel_rule(x: complex, y: complex, n_nodes: int) -> SplitKernelRule:
    """Rule for the complex beta kernel with about n_nodes per half of (0, 1)."""
    x, y = complex(x), complex(y)
    if not (x.real > 0 and y.real > 0):
        raise DomainError(f"beta kernel exponents need positive real parts, got {x}, {y}")
    nodes, comps, weights = [], [], []
    for a, b, near_zero in ((x, y, True), (y, x, False)):
        # the (1-t) factor is singular at u = -Re(a) ln 2 in the Laguerre
        # variable, so small Re(a) needs proportionally more nodes
        n = min(math.ceil(n_nodes * max(1.0, 0.5 / a.real)), MAX_LAGUERRE_NODES)
        u, W = scipy.special.roots_laguerre(n)
        w = u / a.real
        s = 0.5 * np.exp(-w)  # distance to the singular endpoint
        weights.append(W / a.real * np.exp(-a * math.log(2.0) - 1j * a.imag * w + (b - 1) * np.log1p(-s)))
        nodes.append(s if near_zero else 1.0 - s)
        comps.append(1.0 - s if near_zero else s)
    return SplitKernelRule(x - 1, y - 1, np.concatenate(nodes), np.concatenate(weights), np.concatenate(comps))


def _kernel_pairs(X: np.ndarray, Y: np.ndarray):
    px = decompose(X)
    py = decompose(Y)
    if px.kind != "diagonalizable" or py.kind != "diagonalizable":
        return None
    pairs = []
    for k, xk in enumerate(px.eigenvalues):
        Pk = np.outer(px.V[:, k], px.Vinv[k, :])
        for l, yl in enumerate(py.eigenvalues):
            P = Pk @ np.outer(py.V[:, l], py.Vinv[l, :])
            if np.any(P):
                pairs.append((complex(xk), complex(yl), P))
    return pairs


def integrate_beta_kernel(
    X,
    Y,
    n_nodes: int = 128,
    left: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """Compute  int_0^1 left(t) t^(X-I) (1-t)^(Y-I) dt  for positive stable X, Y.

    ``left`` maps an array of nodes to a stack of matrices; None means I.
    Diagonalizable X and Y are split into eigen-projector pairs, each pair
    integrated with its own exact Jacobi weight (real eigenvalues) or a
    split Gauss-Laguerre rule (complex eigenvalues). Defective inputs fall back to
    the worst-case weight t^(beta(X)-1) (1-t)^(beta(Y)-1), integrated with the split
    rule, with the bounded remainder of the matrix powers kept in the integrand.
    """
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    r = X.shape[0]
    rules: dict = {}
    samples: dict = {}

    def rule(a, b):
        key = (a, b)
        if key not in rules:
            rules[key] = jacobi_rule(a, b, n_nodes)
        return rules[key]

    def complex_rule(x, y):
        key = (x - 1, y - 1)
        if key not in rules:
            rules[key] = split_kernel_rule(x, y, n_nodes)
        return rules[key]

    def left_at(q: JacobiQuadRule):
        key = (q.exponent_left, q.exponent_right)
        if key not in samples:
            if left is None:
                samples[key] = np.broadcast_to(eye(r), (len(q.nodes), r, r))
            else:
                samples[key] = np.asarray(left(q.nodes), dtype=complex)
        return samples[key]

    pairs = _kernel_pairs(X, Y)
    total = np.zeros((r, r), dtype=complex)
    if pairs is not None:
        for xk, yl, P in pairs:
            if xk.real <= 0 or yl.real <= 0:
                raise DomainError("beta kernel needs positive stable exponent matrices")
            if xk.imag or yl.imag:
                q = complex_rule(xk, yl)
            else:
                q = rule(xk.real - 1.0, yl.real - 1.0)
            total += q.integrate(left_at(q)) @ P
        return total

    bx = float(np.min(np.linalg.eigvals(X).real))
    by = float(np.min(np.linalg.eigvals(Y).real))
    if bx <= 0 or by <= 0:
        raise DomainError("beta kernel needs positive stable exponent matrices")
    # the remainder powers carry log t factors; the split rule's change of
    # variable makes them polynomial in w, which Gauss-Laguerre handles well
    q = complex_rule(complex(bx), complex(by))
    vals = left_at(q)
    Xs = X - bx * eye(r)
    Ys = Y - by * eye(r)
    # nodes that underflowed onto an endpoint carry negligible weight
    keep = (q.nodes > 0) & (q.complements > 0)
    kern = np.stack([matpow_base(float(t), Xs) @ matpow_base(float(s), Ys) for t, s in zip(q.nodes[keep], q.complements[keep])])
    return np.tensordot(q.weights[keep], vals[keep] @ kern, axes=(0, 0))
