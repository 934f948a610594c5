"""Reference values and random inputs shared by the tests.

The scalar oracle sums the series in mpmath at 40 digits, so it shares no
code with the engine.
"""

import mpmath
import numpy as np

from matfn.series import ParameterSet


def scalar_R(a, b, c, d, z, dps=40, max_terms=5000):
    """Brute-force scalar series sum(rgamma(n a + b) prod (c)_n / prod (d)_n z^n / n!)."""
    with mpmath.workdps(dps):
        a, b, z = mpmath.mpmathify(a), mpmath.mpmathify(b), mpmath.mpmathify(z)
        c = [mpmath.mpmathify(x) for x in c]
        d = [mpmath.mpmathify(x) for x in d]
        total = mpmath.mpf(0)
        ratio = mpmath.mpf(1)  # prod (c)_n / prod (d)_n z^n / n!
        small = 0
        for n in range(max_terms):
            term = mpmath.rgamma(n * a + b) * ratio
            total += term
            if abs(term) < mpmath.mpf(10) ** (-dps + 5) * max(1, abs(total)):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
            num = mpmath.fprod(x + n for x in c)
            if num == 0:
                break
            ratio = ratio * num / mpmath.fprod(x + n for x in d) * z / (n + 1)
        return complex(total)


def scalar_term_sizes(a, b, c, d, z, n_terms):
    """|U_n(z)| for n < n_terms, in mpmath."""
    out = []
    with mpmath.workdps(30):
        for n in range(n_terms):
            num = mpmath.fprod(mpmath.rf(x, n) for x in c)
            den = mpmath.fprod(mpmath.rf(x, n) for x in d)
            out.append(float(abs(mpmath.rgamma(n * a + b) * num / den * mpmath.mpf(z) ** n / mpmath.factorial(n))))
    return np.array(out)


def random_similarity(rng, r, cond_max=20.0):
    """Well conditioned complex S (cond(S) <= cond_max) and its inverse."""
    while True:
        S = np.eye(r) + 0.4 * (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)))
        if np.linalg.cond(S) <= cond_max:
            return S, np.linalg.inv(S)


def commuting_family(rng, r, p, q, lo=0.5, hi=3.0, b_lo=None, gap=None):
    """Simultaneously diagonalizable ParameterSet with real spectra in [lo, hi].

    ``b_lo`` raises the floor of B's spectrum; ``gap`` = (lo2, hi2) gives D_q - C_p
    a spectrum in that range.
    """
    S, Si = random_similarity(rng, r)

    def mat(vals):
        return S @ np.diag(vals) @ Si

    def spectrum(lo_, hi_):
        return rng.uniform(lo_, hi_, r)

    A = mat(spectrum(lo, hi))
    B = mat(spectrum(b_lo if b_lo is not None else lo, hi))
    C = [spectrum(lo, hi) for _ in range(p)]
    D = [spectrum(lo, hi) for _ in range(q)]
    if gap is not None and p and q:
        D[-1] = C[-1] + spectrum(*gap)
    return ParameterSet(A, B, tuple(mat(v) for v in C), tuple(mat(v) for v in D))


def random_positive_stable(rng, r, lo=0.5, hi=3.0, offdiag=0.5):
    """Q T Q^H with T upper triangular, diagonal in [lo, hi]: non-normal, positive stable."""
    T = np.triu(offdiag * (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))), 1)
    T = T + np.diag(rng.uniform(lo, hi, r) + 1j * rng.uniform(-0.5, 0.5, r))
    Q, _ = np.linalg.qr(rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)))
    return Q @ T @ Q.conj().T


def random_point(rng, radius):
    return radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
