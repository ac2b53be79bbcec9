"""Test-bed distributions: samplers, analytic forms and the tail-fattening heuristics.

Stable laws use the S1 characteristic function
    chi(t) = exp(i mu t - |sigma t|^alpha (1 - i beta tan(pi alpha / 2) sgn t)),
so alpha = 2 is a Gaussian with variance 2 sigma^2.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc
from scipy import stats

from .exceptions import DomainError, ParameterError, UndefinedMomentError
from .montecarlo import make_rng
from .sample import Sample

logger = logging.getLogger(__name__)


def _require(cond, message, *args):
    if not cond:
        raise ParameterError(message % args)


# ---------------- Distributions ----------------

@dataclass(frozen=True)
class ParetoI:
    alpha: float
    L: float = 1.0

    name = 'pareto'

    def __post_init__(self):
        _require(self.alpha > 0, 'ParetoI alpha must be > 0, got %r', self.alpha)
        _require(self.L > 0, 'ParetoI L must be > 0, got %r', self.L)

    @property
    def mean(self):
        if self.alpha <= 1:
            raise UndefinedMomentError('Pareto mean is infinite for alpha=%g' % self.alpha)
        return self.L * self.alpha / (self.alpha - 1)

    def moment(self, p):
        if p >= self.alpha:
            raise UndefinedMomentError('E(X^%g) is infinite for alpha=%g' % (p, self.alpha))
        return self.alpha * self.L ** p / (self.alpha - p)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.L, 1.0, (self.L / np.maximum(x, self.L)) ** self.alpha)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.maximum(x, self.L)
        return np.where(x < self.L, 0.0, self.alpha * self.L ** self.alpha * safe ** (-self.alpha - 1))

    def sample(self, rng, n):
        return self.L * (1.0 + rng.pareto(self.alpha, size=n))


@dataclass(frozen=True)
class StudentT:
    alpha: float
    s: float = 1.0
    loc: float = 0.0

    name = 'student'

    def __post_init__(self):
        _require(self.alpha > 0, 'StudentT alpha must be > 0, got %r', self.alpha)
        _require(self.s > 0, 'StudentT scale must be > 0, got %r', self.s)

    @property
    def mean(self):
        if self.alpha <= 1:
            raise UndefinedMomentError('Student mean is undefined for alpha=%g' % self.alpha)
        return self.loc

    def cdf(self, x):
        return stats.t.cdf(x, self.alpha, loc=self.loc, scale=self.s)

    def pdf(self, x):
        return stats.t.pdf(x, self.alpha, loc=self.loc, scale=self.s)

    def sample(self, rng, n):
        return self.loc + self.s * rng.standard_t(self.alpha, size=n)


@dataclass(frozen=True)
class Lognormal:
    mu: float
    sigma: float

    name = 'lognormal'

    def __post_init__(self):
        _require(self.sigma > 0, 'Lognormal sigma must be > 0, got %r', self.sigma)

    @property
    def mean(self):
        return math.exp(self.mu + self.sigma ** 2 / 2)

    def cdf(self, x):
        return stats.lognorm.cdf(x, self.sigma, scale=math.exp(self.mu))

    def pdf(self, x):
        return stats.lognorm.pdf(x, self.sigma, scale=math.exp(self.mu))

    def sample(self, rng, n):
        return rng.lognormal(self.mu, self.sigma, size=n)


@dataclass(frozen=True)
class StableParams:
    alpha_s: float
    beta: float = 0.0
    mu: float = 0.0
    sigma: float = 1.0

    name = 'stable'

    def __post_init__(self):
        _require(0 < self.alpha_s <= 2, 'stable alpha must lie in (0, 2], got %r', self.alpha_s)
        _require(-1 <= self.beta <= 1, 'stable beta must lie in [-1, 1], got %r', self.beta)
        _require(self.sigma > 0, 'stable sigma must be > 0, got %r', self.sigma)

    @property
    def mean(self):
        if self.alpha_s <= 1:
            raise UndefinedMomentError('stable mean is undefined for alpha=%g' % self.alpha_s)
        return self.mu

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        a = self.alpha_s
        if a == 1:
            skew = -2 / math.pi * np.log(np.where(t == 0, 1.0, np.abs(t)))
        else:
            skew = math.tan(math.pi * a / 2)
        expo = np.abs(self.sigma * t) ** a * (1 - 1j * self.beta * np.sign(t) * skew)
        return np.exp(1j * self.mu * t - expo)

    def sample(self, rng, n):
        # Chambers-Mallows-Stuck
        a, b = self.alpha_s, self.beta
        v = rng.uniform(-math.pi / 2, math.pi / 2, size=n)
        w = rng.standard_exponential(size=n)
        if a == 1:
            half = math.pi / 2 + b * v
            x = 2 / math.pi * (half * np.tan(v) - b * np.log(math.pi / 2 * w * np.cos(v) / half))
            return self.sigma * x + 2 / math.pi * b * self.sigma * math.log(self.sigma) + self.mu
        zeta = b * math.tan(math.pi * a / 2)
        shift = math.atan(zeta) / a
        scale = (1 + zeta * zeta) ** (1 / (2 * a))
        x = (scale * np.sin(a * (v + shift)) / np.cos(v) ** (1 / a)
             * (np.cos(v - a * (v + shift)) / w) ** ((1 - a) / a))
        return self.sigma * x + self.mu


@dataclass(frozen=True)
class TwoStateGaussian:
    """Zero-mean Gaussian switching between variances (1+a) sigma^2 (prob p) and (1+b) sigma^2.

    b = -a p / (1 - p) keeps the overall variance at sigma^2.
    """
    sigma: float
    a: float
    p: float = 0.5

    name = 'twostate'

    def __post_init__(self):
        _require(self.sigma > 0, 'sigma must be > 0, got %r', self.sigma)
        _require(0 < self.p < 1, 'switch probability must lie in (0, 1), got %r', self.p)
        _require(self.a >= 0, 'a must be >= 0, got %r', self.a)
        _require(self.a * self.p <= 1 - self.p + 1e-12,
                 'a=%r with p=%r makes the low-variance state negative', self.a, self.p)

    @property
    def b(self):
        return -self.a * self.p / (1 - self.p)

    @property
    def mean(self):
        return 0.0

    @property
    def kurtosis(self):
        return two_state_kurtosis(self.a, self.p)

    def sample(self, rng, n):
        high = rng.random(size=n) < self.p
        var = np.where(high, 1 + self.a, max(1 + self.b, 0.0)) * self.sigma ** 2
        return np.sqrt(var) * rng.standard_normal(size=n)


@dataclass(frozen=True)
class Gaussian:
    mu: float = 0.0
    sigma: float = 1.0

    name = 'gaussian'

    def __post_init__(self):
        _require(self.sigma > 0, 'sigma must be > 0, got %r', self.sigma)

    @property
    def mean(self):
        return self.mu

    def cdf(self, x):
        return stats.norm.cdf(x, loc=self.mu, scale=self.sigma)

    def pdf(self, x):
        return stats.norm.pdf(x, loc=self.mu, scale=self.sigma)

    def sample(self, rng, n):
        return self.mu + self.sigma * rng.standard_normal(size=n)


@dataclass(frozen=True)
class Exponential:
    lam: float = 1.0

    name = 'exponential'

    def __post_init__(self):
        _require(self.lam > 0, 'rate must be > 0, got %r', self.lam)

    @property
    def mean(self):
        return 1.0 / self.lam

    def cdf(self, x):
        return stats.expon.cdf(x, scale=1.0 / self.lam)

    def pdf(self, x):
        return stats.expon.pdf(x, scale=1.0 / self.lam)

    def sample(self, rng, n):
        return rng.standard_exponential(size=n) / self.lam


@dataclass(frozen=True)
class GammaVarianceGaussian:
    """Gaussian with a Gamma variance of mean 1 and variance b (excess kurtosis 3b)."""
    b: float
    sigma: float = 1.0

    name = 'gammavar'

    def __post_init__(self):
        _require(self.b > 0, 'variance-of-variance b must be > 0, got %r', self.b)
        _require(self.sigma > 0, 'sigma must be > 0, got %r', self.sigma)

    @property
    def mean(self):
        return 0.0

    @property
    def kurtosis(self):
        return gamma_variance_kurtosis(self.b)

    def sample(self, rng, n):
        var = rng.gamma(1.0 / self.b, self.b, size=n)
        return self.sigma * np.sqrt(var) * rng.standard_normal(size=n)


@dataclass(frozen=True)
class BimodalGaussian:
    """Equal-weight mixture of N(-d/2, sigma) and N(d/2, sigma)."""
    d: float
    sigma: float = 1.0

    name = 'bimodal'

    def __post_init__(self):
        _require(self.sigma > 0, 'sigma must be > 0, got %r', self.sigma)

    @property
    def mean(self):
        return 0.0

    def sample(self, rng, n):
        sign = np.where(rng.random(size=n) < 0.5, -1.0, 1.0)
        return sign * self.d / 2 + self.sigma * rng.standard_normal(size=n)


DISTRIBUTIONS = {
    cls.name: cls for cls in (
        ParetoI, StudentT, Lognormal, StableParams, TwoStateGaussian,
        Gaussian, Exponential, GammaVarianceGaussian, BimodalGaussian,
    )
}


def sample(dist, n, seed, stream=0):
    """Draw n values from `dist`; deterministic in (dist, n, seed, stream)."""
    n = int(n)
    if n < 1:
        raise ParameterError('sample size must be >= 1, got %r' % n)
    rng = make_rng(seed, stream)
    values = dist.sample(rng, n)
    return Sample(values, name='%s(n=%d, seed=%d)' % (dist, n, seed))


# ---------------- Tail-fattening heuristics ----------------

def two_state_kurtosis(a, p=0.5):
    """Raw kurtosis of the variance-preserving two-state Gaussian."""
    if a < 0 or not 0 < p < 1:
        raise ParameterError('need a >= 0 and p in (0, 1), got a=%r p=%r' % (a, p))
    return 3 * ((1 - a * a) * p - 1) / (p - 1)


def gamma_variance_kurtosis(b):
    return 3 * (1 + b)


def mixture_kurtosis(mu1, mu2, sigma1, sigma2):
    """Raw kurtosis of the equal-weight mixture of N(mu1, sigma1) and N(mu2, sigma2)."""
    if sigma1 <= 0 or sigma2 <= 0:
        raise ParameterError('mixture scales must be > 0')
    half = (mu1 - mu2) / 2
    s1, s2 = sigma1 ** 2, sigma2 ** 2
    m2 = (s1 + s2) / 2 + half ** 2
    m4 = half ** 4 + 3 * half ** 2 * (s1 + s2) + 1.5 * (s1 ** 2 + s2 ** 2)
    return m4 / m2 ** 2


def mixture_gaussian_separation(sigma1, sigma2):
    """Mean separation |mu1 - mu2| at which the mixture has Gaussian kurtosis 3."""
    return 6 ** 0.25 * math.sqrt(abs(sigma1 ** 2 - sigma2 ** 2))


def gaussian_crossovers(mu, sigma):
    """Points where the density is neither helped nor hurt by a small scale perturbation."""
    if sigma <= 0:
        raise ParameterError('sigma must be > 0, got %r' % sigma)
    outer = math.sqrt((5 + math.sqrt(17)) / 2)
    inner = math.sqrt((5 - math.sqrt(17)) / 2)
    return (mu - outer * sigma, mu - inner * sigma, mu + inner * sigma, mu + outer * sigma)


def student_crossovers(alpha, s=1.0, mu=0.0):
    """Scale-perturbation crossovers of a Student T; tends to the Gaussian set as alpha grows."""
    if alpha <= 1 or s <= 0:
        raise ParameterError('need alpha > 1 and s > 0, got alpha=%r s=%r' % (alpha, s))
    root = math.sqrt((alpha + 1) * (17 * alpha + 1))
    outer = math.sqrt((5 * alpha + 1 + root) / (2 * (alpha - 1)))
    inner = math.sqrt((5 * alpha + 1 - root) / (2 * (alpha - 1)))
    return (mu - outer * s, mu - inner * s, mu + inner * s, mu + outer * s)


def std_over_mad(dist):
    """Ratio of standard deviation to mean absolute deviation around the mean."""
    if isinstance(dist, Gaussian):
        return math.sqrt(math.pi / 2)
    if isinstance(dist, ParetoI):
        a = dist.alpha
        if a <= 2:
            raise UndefinedMomentError('STD/MD needs alpha > 2 for Pareto, got %g' % a)
        return a ** (a - 0.5) / (2 * math.sqrt(a - 2) * (a - 1) ** (a - 1))
    if isinstance(dist, StudentT):
        a = dist.alpha
        if a <= 2:
            raise UndefinedMomentError('STD/MD needs alpha > 2 for Student, got %g' % a)
        std = math.sqrt(a / (a - 2))
        mad = 2 * math.sqrt(a) * math.exp(sc.gammaln((a + 1) / 2) - sc.gammaln(a / 2)) / (math.sqrt(math.pi) * (a - 1))
        return std / mad
    raise ParameterError('std_over_mad supports Gaussian, ParetoI and StudentT, got %r' % (dist,))


def stable_mean_abs_dev(params):
    """E|X - mu| for a stable law with alpha in (1, 2]."""
    a = params.alpha_s
    if not 1 < a <= 2:
        raise DomainError('stable mean absolute deviation needs alpha in (1, 2], got %r' % a)
    skew = 1j * params.beta * math.tan(math.pi * a / 2)
    branch = (1 + skew) ** (1 / a) + (1 - skew) ** (1 / a)
    return float(params.sigma / math.pi * sc.gamma((a - 1) / a) * branch.real)
