"""Matrix function pRq(A, B; z): series, identities, integral and fractional transforms."""

from .errors import AccuracyError, DomainError, MatfnError, NumericError, ParseError, PreconditionError
from .gammakit import beta_m, gamma_m, pochhammer, rgamma_m, spectral_bounds
from .matcore import decompose, fro_norm, matfun, matpow_base
from .series import ConvergenceVerdict, EvalResult, ParameterSet, SeriesOptions, Verdict, classify, shift
from .series import eval as evaluate

__all__ = [
    "AccuracyError",
    "ConvergenceVerdict",
    "DomainError",
    "EvalResult",
    "MatfnError",
    "NumericError",
    "ParameterSet",
    "ParseError",
    "PreconditionError",
    "SeriesOptions",
    "Verdict",
    "beta_m",
    "classify",
    "decompose",
    "evaluate",
    "fro_norm",
    "gamma_m",
    "matfun",
    "matpow_base",
    "pochhammer",
    "rgamma_m",
    "shift",
    "spectral_bounds",
]

__version__ = "0.1.0"
