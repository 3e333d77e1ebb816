"""Log-gamma, polygamma and regularized incomplete gamma functions.

Scalar routines are numba-compiled so the array kernels can call them;
they are plain Python when numba is unavailable.
"""
import math

import numpy as np
from scipy import special as _sp

from ._accel import USE_NUMBA, njit
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_LN_2PI = 1.8378770664093454836
_MAX_ITER = 200_000

# Bernoulli numbers B_2k for the asymptotic expansions, k = 1..8
_B2K = np.array([
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0,
])


@njit
def _digamma(x):
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for k in range(_B2K.shape[0]):
        series += _B2K[k] / (2.0 * (k + 1)) * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


@njit
def _trigamma(x):
    acc = 0.0
    while x < 10.0:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv2 * inv
    for k in range(_B2K.shape[0]):
        series += _B2K[k] * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + series


@njit
def _log1pmx(t):
    # log(1 + t) - t without cancellation for small |t|
    if abs(t) < 0.3:
        term = t
        total = 0.0
        n = 2
        while True:
            term *= -t
            contrib = term / n
            total += contrib
            if abs(contrib) <= 1e-17 * abs(total):
                break
            n += 1
        return total
    return math.log1p(t) - t


@njit
def _stirling_remainder(a):
    # lgamma(a) - [(a - 1/2) log a - a + log(2 pi)/2], valid for a >= 10
    inv = 1.0 / a
    inv2 = inv * inv
    total = 0.0
    power = inv
    for k in range(_B2K.shape[0]):
        m = k + 1
        total += _B2K[k] / (2.0 * m * (2.0 * m - 1.0)) * power
        power *= inv2
    return total


@njit
def _log_gamma_prefactor(a, x):
    """log(x**a * exp(-x) / Gamma(a))."""
    if a < 10.0:
        return a * math.log(x) - x - math.lgamma(a)
    t = (x - a) / a
    # away from x = a, 1 + t is rounded; take log(x / a) directly
    core = _log1pmx(t) if abs(t) < 0.3 else math.log(x / a) - t
    return a * core + 0.5 * (math.log(a) - _LN_2PI) - _stirling_remainder(a)


@njit
def _gamma_p_series(a, x):
    term = 1.0 / a
    total = term
    n = 1
    while n < _MAX_ITER:
        term *= x / (a + n)
        total += term
        if term <= total * 1e-17:
            break
        n += 1
    return math.exp(_log_gamma_prefactor(a, x)) * total


@njit
def _gamma_q_contfrac(a, x):
    # modified Lentz evaluation of the Legendre continued fraction
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    i = 1
    while i < _MAX_ITER:
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= 1e-16:
            break
        i += 1
    return math.exp(_log_gamma_prefactor(a, x)) * h


@njit
def _gamma_p(a, x):
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


@njit
def _gamma_q(a, x):
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def _check_positive(name, x):
    if not x > 0:
        raise DomainError(f"{name} requires a positive argument, got {x!r}")


def log_gamma(x):
    """Natural log of the gamma function for ``x > 0``.

    Scalars go through the C library ``lgamma``; arrays are evaluated
    elementwise with ``scipy.special.gammaln``.
    """
    if np.ndim(x) == 0:
        x = float(x)
        _check_positive("log_gamma", x)
        return math.lgamma(x)
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError("log_gamma requires positive arguments")
    return _sp.gammaln(arr)


def digamma(x):
    """Digamma function psi(x) for ``x > 0``."""
    x = float(x)
    _check_positive("digamma", x)
    return _digamma(x)


def trigamma(x):
    """First derivative of the digamma function, ``x > 0``."""
    x = float(x)
    _check_positive("trigamma", x)
    return _trigamma(x)


def regularized_gamma_p(shape, x):
    """Lower regularized incomplete gamma function P(shape, x).

    Series expansion below ``x = shape + 1``, continued fraction above.
    For ``shape >= 10`` the prefactor is assembled from a Stirling remainder
    and ``log1p(t) - t`` so that accuracy holds for large shapes.
    """
    shape = float(shape)
    x = float(x)
    _check_positive("regularized_gamma_p (shape)", shape)
    if x < 0:
        raise DomainError(f"regularized_gamma_p requires x >= 0, got {x!r}")
    if math.isinf(x):
        return 1.0
    return _gamma_p(shape, x)


def regularized_gamma_q(shape, x):
    """Upper regularized incomplete gamma function Q = 1 - P."""
    shape = float(shape)
    x = float(x)
    _check_positive("regularized_gamma_q (shape)", shape)
    if x < 0:
        raise DomainError(f"regularized_gamma_q requires x >= 0, got {x!r}")
    if math.isinf(x):
        return 0.0
    return _gamma_q(shape, x)


@njit
def _gamma_p_loop(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _gamma_p(a, x[i]) if x[i] > 0.0 else 0.0
    return out


def regularized_gamma_p_array(shape, x):
    """Vectorised P(shape, x); compiled loop, or scipy's ``gammainc`` when
    the numba backend is disabled."""
    shape = float(shape)
    _check_positive("regularized_gamma_p_array (shape)", shape)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("regularized_gamma_p_array requires x >= 0")
    if USE_NUMBA:
        return _gamma_p_loop(shape, arr.ravel()).reshape(arr.shape)
    return _sp.gammainc(shape, arr)


def chi2_sf(statistic, dof):
    """Upper tail probability of the chi-square law."""
    if dof <= 0:
        raise DomainError(f"chi-square dof must be positive, got {dof!r}")
    if statistic <= 0:
        return 1.0
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic)


# aliases matching the operation names used in the docs
special_log_gamma = log_gamma
special_digamma = digamma
special_regularized_gamma_inc = regularized_gamma_p
