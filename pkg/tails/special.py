"""Special functions behind the closed forms.

Double-precision paths come from scipy.special. The incomplete gamma function with a
negative (or non-positive integer) first argument and the exponential integral of
non-integer order go through mpmath, evaluated with guard digits and returned as float.
All functions are pure and safe to call from concurrent workers.
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sc

from .exceptions import DomainError

logger = logging.getLogger(__name__)

_GUARD_DPS = 30
_CHECK_DPS = 40
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpecialFnResult:
    value: float
    abs_error_estimate: float


# ---------------- Incomplete gamma / exponential integral ----------------

def _mp_upper_gamma(a, z, dps=_GUARD_DPS):
    with mpmath.workdps(dps):
        return mpmath.gammainc(a, z)


def upper_incomplete_gamma(a, z):
    """Γ(a, z) = ∫_z^∞ t^(a-1) e^(-t) dt for real a and z > 0."""
    a = float(a)
    z = float(z)
    if not z > 0 or not math.isfinite(z):
        raise DomainError('upper_incomplete_gamma needs z > 0, got %r' % z)
    if a > 0:
        if a < 170:
            return float(sc.gammaincc(a, z) * sc.gamma(a))
        return float(_mp_upper_gamma(a, z))
    if a == 0:
        return float(sc.exp1(z))
    return float(_mp_upper_gamma(a, z))


def log_upper_incomplete_gamma(a, z):
    """log Γ(a, z) for a > 0, usable where Γ(a, z) itself overflows."""
    if not a > 0:
        raise DomainError('log_upper_incomplete_gamma needs a > 0, got %r' % a)
    if not z > 0:
        raise DomainError('log_upper_incomplete_gamma needs z > 0, got %r' % z)
    q = sc.gammaincc(a, z)
    if q > 0:
        return float(math.log(q) + sc.gammaln(a))
    with mpmath.workdps(_GUARD_DPS):
        return float(mpmath.log(mpmath.gammainc(a, z)))


def upper_incomplete_gamma_scaled(a, z):
    """e^z z^(1-a) Γ(a, z), which tends to 1 as z grows."""
    z = float(z)
    if not z > 0 or not math.isfinite(z):
        raise DomainError('upper_incomplete_gamma_scaled needs z > 0, got %r' % z)
    if z < 500:
        return math.exp(z) * z ** (1 - a) * upper_incomplete_gamma(a, z)
    with mpmath.workdps(_GUARD_DPS):
        return float(mpmath.exp(z) * mpmath.power(z, 1 - a) * mpmath.gammainc(a, z))


def exponential_integral(n, z):
    """E_n(z) = ∫_1^∞ e^(-z t) t^(-n) dt for real n >= 0 and z > 0."""
    n = float(n)
    z = float(z)
    if not z > 0 or not math.isfinite(z):
        raise DomainError('exponential_integral needs z > 0, got %r' % z)
    if n < 0:
        raise DomainError('exponential_integral needs n >= 0, got %r' % n)
    if n == 0:
        return math.exp(-z) / z
    if n.is_integer():
        return float(sc.expn(int(n), z))
    with mpmath.workdps(_GUARD_DPS):
        return float(mpmath.expint(n, z))


# ---------------- Beta / error function inverses ----------------

def reg_incomplete_beta(x, a, b):
    return float(sc.betainc(a, b, x))


def inv_reg_incomplete_beta(p, a, b):
    """x in (0, 1) with I_x(a, b) = p."""
    p = float(p)
    if not 0 < p < 1:
        raise DomainError('inv_reg_incomplete_beta needs p in (0, 1), got %r' % p)
    if not (a > 0 and b > 0):
        raise DomainError('inv_reg_incomplete_beta needs a, b > 0, got (%r, %r)' % (a, b))
    x = float(sc.betaincinv(a, b, p))
    # Newton polish in probability space
    log_norm = sc.betaln(a, b)
    for _ in range(4):
        if not 0 < x < 1:
            break
        resid = sc.betainc(a, b, x) - p
        if abs(resid) <= 1e-15:
            break
        dens = math.exp((a - 1) * math.log(x) + (b - 1) * math.log1p(-x) - log_norm)
        if not dens > 0 or not math.isfinite(dens):
            break
        step = resid / dens
        candidate = x - step
        if not 0 < candidate < 1:
            break
        if abs(sc.betainc(a, b, candidate) - p) >= abs(resid):
            break
        x = candidate
    return x


def erfc_inv(y):
    y = float(y)
    if not 0 < y < 2:
        raise DomainError('erfc_inv needs y in (0, 2), got %r' % y)
    return float(sc.erfcinv(y))


def erf_inv(y):
    y = float(y)
    if not -1 < y < 1:
        raise DomainError('erf_inv needs y in (-1, 1), got %r' % y)
    return float(sc.erfinv(y))


# ---------------- Harmonic numbers ----------------

def harmonic(t):
    """H_t = sum_{i<=t} 1/i, compensated."""
    t = _positive_int(t)
    return math.fsum(1.0 / i for i in range(1, t + 1))


def harmonic2(t):
    """Second-order harmonic number sum_{i<=t} 1/i^2."""
    t = _positive_int(t)
    return math.fsum(1.0 / (i * i) for i in range(1, t + 1))


def _positive_int(t):
    if int(t) != t or t < 1:
        raise DomainError('harmonic numbers need an integer t >= 1, got %r' % (t,))
    return int(t)


# ---------------- Error estimates ----------------

def _reference(name, args):
    with mpmath.workdps(_CHECK_DPS):
        if name == 'upper_incomplete_gamma':
            a, z = args
            return float(mpmath.gammainc(a, z))
        if name == 'exponential_integral':
            n, z = args
            return float(mpmath.expint(n, z))
        if name == 'inv_reg_incomplete_beta':
            p, a, b = args
            x = inv_reg_incomplete_beta(p, a, b)
            # error in x implied by the residual in p
            resid = float(mpmath.betainc(a, b, 0, x, regularized=True)) - p
            dens = float(mpmath.exp(
                (a - 1) * mpmath.log(x) + (b - 1) * mpmath.log(1 - x) - mpmath.log(mpmath.beta(a, b))))
            return x - resid / dens if dens > 0 else x
        if name == 'erfc_inv':
            (y,) = args
            return float(mpmath.erfinv(1 - mpmath.mpf(y)))
        if name == 'erf_inv':
            (y,) = args
            return float(mpmath.erfinv(y))
        if name == 'harmonic':
            (t,) = args
            return float(mpmath.harmonic(t))
    raise DomainError('no reference evaluation for %r' % name)


_FUNCTIONS = {
    'upper_incomplete_gamma': upper_incomplete_gamma,
    'exponential_integral': exponential_integral,
    'inv_reg_incomplete_beta': inv_reg_incomplete_beta,
    'erfc_inv': erfc_inv,
    'erf_inv': erf_inv,
    'harmonic': harmonic,
}


def checked(name, *args):
    """Evaluate a special function and bound its error against a 40-digit reference."""
    try:
        fn = _FUNCTIONS[name]
    except KeyError:
        raise DomainError('unknown special function %r' % name) from None
    value = fn(*args)
    ref = _reference(name, args)
    err = abs(value - ref) + 4 * _EPS * abs(value)
    if err > 1e-9 * max(abs(value), 1e-300):
        logger.warning('%s%r: error estimate %.3g exceeds contract', name, args, err)
    return SpecialFnResult(value=value, abs_error_estimate=err)
