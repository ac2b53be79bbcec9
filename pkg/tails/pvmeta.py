"""Sampling law of the p-value across statistically identical replications.

A one-tailed test statistic is zeta_bar + T, with T Student with n degrees of freedom (or
Gaussian in the limit). zeta_bar is fixed by the median p-value p_M, so p_M is the only
parameter of the limiting law.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, stats
from scipy.special import erfc

from .exceptions import DomainError, ParameterError
from .montecarlo import run_sharded
from .sample import Sample
from .special import erf_inv, erfc_inv, inv_reg_incomplete_beta

logger = logging.getLogger(__name__)

LIMIT = 'limit'


@dataclass(frozen=True)
class PvMetaSpec:
    p_median: float
    n: int | None = None

    def __post_init__(self):
        if not 0 < self.p_median < 1:
            raise ParameterError('median p-value must lie in (0, 1), got %r' % self.p_median)
        if self.p_median == 0.5:
            # zeta_bar = 0: every p-value law collapses to the uniform
            raise ParameterError('median p-value 1/2 carries no effect; the p-value is plain uniform')
        if self.n is not None and (int(self.n) != self.n or self.n < 2):
            raise ParameterError("n must be an integer >= 2 or 'limit', got %r" % self.n)

    @classmethod
    def build(cls, p_median, n=None):
        if n in (None, LIMIT):
            return cls(p_median)
        return cls(p_median, int(n))

    @property
    def is_limit(self):
        return self.n is None

    @property
    def zeta_bar(self):
        return statistic_for(self.p_median, self.n)


def statistic_for(p, n=None):
    """One-tailed statistic whose p-value is p: sqrt(2) erfc^-1(2p), or its Student analogue."""
    if not 0 < p < 1:
        raise DomainError('p must lie in (0, 1), got %r' % p)
    if n is None:
        return math.sqrt(2) * erfc_inv(2 * p)
    if p == 0.5:
        return 0.0
    if p < 0.5:
        lam = inv_reg_incomplete_beta(2 * p, n / 2, 0.5)
        return math.sqrt(n * (1 - lam) / lam)
    lam = inv_reg_incomplete_beta(2 * p - 1, 0.5, n / 2)
    return -math.sqrt(n * lam / (1 - lam))


def _check_p(p):
    if not 0 < p < 1:
        raise DomainError('p must lie in (0, 1), got %r' % p)


def pv_density(p, spec):
    _check_p(p)
    zeta = statistic_for(p, spec.n)
    zbar = spec.zeta_bar
    if spec.is_limit:
        return math.exp(zeta * zbar - zbar * zbar / 2)
    n = spec.n
    return ((n + zeta * zeta) / (n + (zeta - zbar) ** 2)) ** ((n + 1) / 2)


def pv_cdf(k, p_median, n=None):
    """P(p <= k); the limit is erfc(erf^-1(1 - 2k) - erf^-1(1 - 2 p_M)) / 2."""
    _check_p(k)
    if n is None:
        return float(0.5 * erfc(erf_inv(1 - 2 * k) - erf_inv(1 - 2 * p_median)))
    zeta = statistic_for(k, n)
    return float(stats.t.sf(zeta - statistic_for(p_median, n), n))


def pv_quantile(level, p_median, n=None):
    if not 0 < level < 1:
        raise DomainError('level must lie in (0, 1), got %r' % level)
    zbar = statistic_for(p_median, n)
    law = stats.norm if n is None else stats.t(n)
    # P(p <= k) = level  <=>  zeta_k = zbar + T.isf(level)
    zeta = zbar + float(law.isf(level))
    return float(law.sf(zeta))


def pv_min_density(p, p_median, m, n=None):
    """Density of the smallest of m independent p-values."""
    if int(m) != m or m < 1:
        raise ParameterError('m must be an integer >= 1, got %r' % m)
    spec = PvMetaSpec(p_median, n)
    f = pv_density(p, spec)
    if m == 1:
        return f
    return m * f * (1 - pv_cdf(p, p_median, n)) ** (m - 1)


def pv_small_p(p, p_median):
    """Asymptotic form of the limiting density for small p and p_M."""
    for v in (p, p_median):
        if not 0 < v < 1 / (2 * math.pi):
            raise DomainError('small-p form needs values in (0, 1/(2 pi)), got %r' % v)

    def zeta(v):
        return math.sqrt(-math.log(2 * math.pi * math.log(1 / (2 * math.pi * v * v))) - 2 * math.log(v))

    prefactor = math.sqrt(2 * math.pi) * p_median * math.sqrt(math.log(1 / (2 * math.pi * p_median ** 2)))
    return prefactor * math.exp(zeta(p) * zeta(p_median))


# ---------------- Quadratures ----------------

def _quad01(fn, breaks):
    points = sorted({b for b in breaks if 0 < b < 1})
    val, _ = integrate.quad(fn, 0, 1, points=points, limit=400, epsabs=1e-12, epsrel=1e-10)
    return val


def pv_integral(spec):
    return _quad01(lambda p: pv_density(p, spec), [spec.p_median, 0.5])


def pv_mean(p_median, n=None):
    """Mean p-value, the integral of the survival function."""
    return _quad01(lambda k: 1 - pv_cdf(k, p_median, n), [p_median, 0.5])


def pv_median_for_mean(p_s, n=None):
    """Median p-value whose law has mean p_s."""
    if not 0 < p_s < 1:
        raise DomainError('mean p-value must lie in (0, 1), got %r' % p_s)
    return optimize.brentq(lambda pm: pv_mean(pm, n) - p_s, 1e-12, 1 - 1e-12, xtol=1e-14)


def pv_min_expectation(p_median, m, n=None):
    """Expected minimum of m p-values."""
    if int(m) != m or m < 1:
        raise ParameterError('m must be an integer >= 1, got %r' % m)
    return _quad01(lambda k: (1 - pv_cdf(k, p_median, n)) ** m, [p_median, 0.5])


# ---------------- Simulation ----------------

def _draw_pvalues(rng, size, zbar, n):
    if n is None:
        return stats.norm.sf(zbar + rng.standard_normal(size))
    return stats.t.sf(zbar + rng.standard_t(n, size=size), n)


def pv_simulate(p_median, n, reps, seed, workers=1):
    """Realized one-tailed p-values of tests whose median p-value is p_median."""
    if reps < 1:
        raise ParameterError('reps must be >= 1, got %r' % reps)
    if n == LIMIT:
        n = None
    zbar = statistic_for(p_median, n)
    chunks = run_sharded(_draw_pvalues, seed, reps, args=(zbar, n), workers=workers)
    values = np.concatenate(chunks)
    logger.info('simulated %d p-values with median %g (n=%s)', reps, p_median, n or LIMIT)
    return Sample(values, name='pvalues', meta={'p_median': p_median, 'n': n or LIMIT})
