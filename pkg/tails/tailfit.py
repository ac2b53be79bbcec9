"""Tail-exponent inference.

Pareto MLE with its exact inverse-gamma sampling law, Hill-style sweeps, GPD fits on
threshold excesses, Frechet calibration of maxima, hidden-tail accounting and the mean bias
induced by an uncertain exponent.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, stats

from .exceptions import (ConvergenceError, InsufficientDataError, ParameterError,
                         UndefinedMomentError)
from .montecarlo import make_rng, run_sharded
from .sample import as_sample

logger = logging.getLogger(__name__)

GPD_LOW_COUNT = 30
GPD_XI_STARTS = (0.1, 0.5, 1.0, 1.5, 2.5)


@dataclass
class TailFit:
    alpha_hat: float
    L: float
    n_exceed: int
    stderr: float
    debiased: bool = False

    def as_dict(self):
        return {'alpha_hat': self.alpha_hat, 'L': self.L, 'n_exceed': self.n_exceed,
                'stderr': self.stderr, 'debiased': self.debiased}


@dataclass
class GpdFit:
    xi: float
    beta: float
    u: float
    n_exceed: int
    stderrs: tuple
    loglik: float = math.nan
    low_count: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def alpha(self):
        return 1 / self.xi if self.xi > 0 else math.inf

    def as_dict(self):
        return {'xi': self.xi, 'beta': self.beta, 'u': self.u, 'n_exceed': self.n_exceed,
                'stderrs': list(self.stderrs), 'loglik': self.loglik, 'alpha': self.alpha,
                'low_count': self.low_count}


# ---------------- Pareto MLE ----------------

def pareto_mle(sample, L, debiased=False):
    """alpha_hat = n / sum(log(x_i / L)) over the observations above L."""
    if L <= 0:
        raise ParameterError('threshold L must be > 0, got %r' % L)
    x = as_sample(sample).values
    x = x[x > L]
    n = x.size
    if n < 2:
        raise InsufficientDataError('need at least 2 exceedances above %g, got %d' % (L, n))
    total = float(np.sum(np.log(x / L)))
    alpha = n / total
    if debiased:
        alpha *= (n - 1) / n
    return TailFit(alpha_hat=alpha, L=float(L), n_exceed=int(n), stderr=alpha / math.sqrt(n),
                   debiased=debiased)


def hill_sweep(sample, ks):
    """pareto_mle on the top-k order statistics, thresholded at the (k+1)-th largest value."""
    x = np.sort(as_sample(sample).values)[::-1]
    fits = []
    for k in ks:
        k = int(k)
        if not 2 <= k < x.size:
            raise ParameterError('k must lie in [2, %d), got %r' % (x.size, k))
        L = x[k]
        if L <= 0:
            raise ParameterError('order statistic %d is not positive' % (k + 1))
        top = x[:k]
        alpha = k / float(np.sum(np.log(top / L)))
        fits.append(TailFit(alpha_hat=alpha, L=float(L), n_exceed=k, stderr=alpha / math.sqrt(k)))
    return fits


class AlphaDensity:
    """Sampling density of the Pareto exponent estimator, optionally truncated from below."""

    def __init__(self, alpha_true, n, truncate_at=None, debiased=True):
        if alpha_true <= 0 or n < 2:
            raise ParameterError('need alpha > 0 and n >= 2')
        scale = (n - 1) * alpha_true if debiased else n * alpha_true
        self.law = stats.invgamma(n, scale=scale)
        self.n = n
        self.alpha_true = alpha_true
        self.lower = 0.0 if truncate_at is None else float(truncate_at)
        if truncate_at is not None and truncate_at < 1:
            raise ParameterError('truncation point must be >= 1, got %r' % truncate_at)
        self.mass = float(self.law.sf(self.lower)) if truncate_at is not None else 1.0
        if self.mass <= 0:
            raise ConvergenceError('no sampling mass above the truncation point')

    def __call__(self, a):
        return self.pdf(a)

    def pdf(self, a):
        a = np.asarray(a, dtype=float)
        return np.where(a > self.lower, self.law.pdf(a) / self.mass, 0.0)

    def cdf(self, a):
        a = np.asarray(a, dtype=float)
        base = self.law.cdf(self.lower) if self.lower > 0 else 0.0
        return np.where(a > self.lower, (self.law.cdf(a) - base) / self.mass, 0.0)

    def _quad(self, fn):
        split = max(float(self.law.ppf(0.999)), self.lower + 1.0)
        mode = self.mode()
        points = [mode] if self.lower < mode < split else None
        body, _ = integrate.quad(fn, self.lower, split, limit=200, points=points)
        tail, _ = integrate.quad(fn, split, np.inf, limit=200)
        return body + tail

    def mean(self):
        if self.lower == 0:
            return float(self.law.mean())
        return self._quad(lambda a: a * self.pdf(a))

    def mode(self):
        return max(float(self.law.kwds['scale']) / (self.n + 1), self.lower)

    def integral(self):
        return self._quad(lambda a: float(self.pdf(a)))


def alpha_sampling_density(alpha_true, n, truncate_at=None, debiased=True):
    if alpha_true <= 1 and truncate_at is not None:
        logger.warning('truncating the sampling law of alpha=%g below %g', alpha_true, truncate_at)
    return AlphaDensity(alpha_true, n, truncate_at=truncate_at, debiased=debiased)


def plugin_pareto_mean(fit):
    if fit.alpha_hat <= 1:
        raise UndefinedMomentError('plug-in mean needs alpha_hat > 1, got %g' % fit.alpha_hat)
    return fit.L * fit.alpha_hat / (fit.alpha_hat - 1)


def alpha_mixture_mean(alphas, weights, L=1.0):
    """Plug-in Pareto mean averaged over a discrete distribution of exponents."""
    alphas = np.asarray(alphas, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.any(alphas <= 1):
        raise UndefinedMomentError('every exponent must exceed 1')
    weights = weights / weights.sum()
    return float(L * np.dot(weights, alphas / (alphas - 1)))


# ---------------- Generalized Pareto ----------------

def gpd_logpdf(w, xi, beta):
    w = np.asarray(w, dtype=float)
    if beta <= 0:
        return np.full(w.shape, -np.inf)
    z = w / beta
    if abs(xi) < 1e-12:
        return -math.log(beta) - z
    s = 1 + xi * z
    with np.errstate(divide='ignore', invalid='ignore'):
        out = -math.log(beta) - (1 + 1 / xi) * np.log(s)
    return np.where((s > 0) & (w >= 0), out, -np.inf)


def gpd_cdf(w, xi, beta):
    w = np.maximum(np.asarray(w, dtype=float), 0.0)
    if abs(xi) < 1e-12:
        return 1 - np.exp(-w / beta)
    s = np.maximum(1 + xi * w / beta, 0.0)
    with np.errstate(divide='ignore'):
        return 1 - s ** (-1 / xi)


def gpd_sample(rng, n, xi, beta):
    u = rng.random(size=n)
    if abs(xi) < 1e-12:
        return -beta * np.log1p(-u)
    return beta * ((1 - u) ** (-xi) - 1) / xi


def _gpd_nll(params, w):
    xi, beta = params
    ll = gpd_logpdf(w, xi, beta)
    total = float(np.sum(ll))
    return -total if math.isfinite(total) else math.inf


def _profile_nll(theta, w):
    # theta = xi / beta; xi has a closed form given theta
    s = 1 + theta * w
    if np.any(s <= 0):
        return math.inf, math.nan
    xi = float(np.mean(np.log1p(theta * w)))
    if xi == 0 or theta == 0:
        return math.inf, xi
    ratio = xi / theta
    if ratio <= 0:
        return math.inf, xi
    return math.log(ratio) + 1 + xi, xi


def _observed_information(w, xi, beta):
    def f(p):
        return _gpd_nll(p, w)

    h = np.array([1e-4 * max(1.0, abs(xi)), 1e-4 * beta])
    x0 = np.array([xi, beta])
    hess = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            ei = np.eye(2)[i] * h[i]
            ej = np.eye(2)[j] * h[j]
            hess[i, j] = (f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)) / (4 * h[i] * h[j])
    return hess


def _gpd_stderrs(w, xi, beta):
    n = w.size
    try:
        hess = _observed_information(w, xi, beta)
        cov = np.linalg.inv(hess)
        diag = np.diag(cov)
        if np.all(np.isfinite(diag)) and np.all(diag > 0):
            return float(math.sqrt(diag[0])), float(math.sqrt(diag[1]))
    except np.linalg.LinAlgError:
        pass
    logger.warning('observed information not positive definite; using expected information')
    return (1 + xi) / math.sqrt(n), beta * math.sqrt(2 * (1 + xi) / n)


def gpd_fit_mle(sample, u):
    """Maximum likelihood (xi, beta) of the GPD on excesses over u."""
    x = as_sample(sample).values
    w = x[x > u] - u
    n = int(w.size)
    if n < 3:
        raise InsufficientDataError('need at least 3 exceedances above %g, got %d' % (u, n))
    low = n < GPD_LOW_COUNT
    if low:
        logger.warning('GPD fit above %g uses only %d exceedances', u, n)

    w_mean, w_max = float(w.mean()), float(w.max())
    # exponential sub-family
    best = (math.log(w_mean) + 1, 0.0, math.inf)
    # positive theta: starts from xi in GPD_XI_STARTS with a moment-style scale guess
    starts = [xi / (w_mean * max(1 - xi, 0.1)) for xi in GPD_XI_STARTS]
    grid = np.unique(np.concatenate((
        np.geomspace(1e-6 / w_mean, 1e6 / w_mean, 241),
        -np.geomspace(1e-6, 1 - 1e-9, 60)[::-1] / w_max,
        starts,
    )))
    for theta in grid:
        val, xi = _profile_nll(theta, w)
        if val < best[0]:
            best = (val, xi, theta)
    if math.isfinite(best[2]):
        i = int(np.searchsorted(grid, best[2]))
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, grid.size - 1)]
        res = optimize.minimize_scalar(lambda t: _profile_nll(t, w)[0], bounds=(lo, hi),
                                       method='bounded')
        if res.success and res.fun <= best[0]:
            val, xi = _profile_nll(res.x, w)
            best = (val, xi, res.x)
    val, xi, theta = best
    beta = w_mean if not math.isfinite(theta) else xi / theta
    if not (math.isfinite(val) and beta > 0):
        raise ConvergenceError('GPD likelihood has no interior optimum above %g' % u,
                               diagnostics={'n_exceed': n, 'max_excess': w_max, 'mean_excess': w_mean})

    polish = optimize.minimize(_gpd_nll, x0=[xi, beta], args=(w,), method='Nelder-Mead',
                               options={'xatol': 1e-10, 'fatol': 1e-12, 'maxiter': 4000})
    if polish.success and polish.fun <= _gpd_nll((xi, beta), w):
        xi, beta = float(polish.x[0]), float(polish.x[1])
    on_boundary = xi < -0.5
    if on_boundary:
        logger.warning('GPD shape %g is below -1/2; regularity conditions fail', xi)
    stderrs = _gpd_stderrs(w, xi, beta)
    return GpdFit(xi=xi, beta=beta, u=float(u), n_exceed=n, stderrs=stderrs,
                  loglik=-_gpd_nll((xi, beta), w), low_count=low,
                  diagnostics={'boundary': on_boundary, 'grid_points': int(grid.size)})


def _gpd_bootstrap_shard(rng, size, x, u, fraction):
    out = []
    m = max(int(round(fraction * x.size)), 1)
    for _ in range(size):
        sub = rng.choice(x, size=m, replace=False)
        try:
            fit = gpd_fit_mle(sub, u)
            out.append((fit.xi, fit.beta))
        except (InsufficientDataError, ConvergenceError):
            out.append((math.nan, math.nan))
    return np.asarray(out, dtype=float).reshape(-1, 2)


def gpd_bootstrap(sample, u, reps=1000, fraction=0.9, seed=0, workers=1, levels=(2.5, 97.5)):
    """Percentile intervals of (xi, beta) from refits on subsamples without replacement."""
    x = as_sample(sample).values
    chunks = run_sharded(_gpd_bootstrap_shard, seed, reps, args=(x, u, fraction), workers=workers,
                         shard_size=100)
    draws = np.concatenate(chunks)
    ok = draws[np.all(np.isfinite(draws), axis=1)]
    if ok.shape[0] < 2:
        raise ConvergenceError('bootstrap refits failed')
    return {
        'reps': int(reps),
        'failed': int(draws.shape[0] - ok.shape[0]),
        'xi': np.percentile(ok[:, 0], levels).tolist(),
        'beta': np.percentile(ok[:, 1], levels).tolist(),
        'xi_mean': float(ok[:, 0].mean()),
        'beta_mean': float(ok[:, 1].mean()),
    }


def perturbed_alpha(sample, L, spread=0.1, reps=200, seed=0):
    """Average refitted exponent when each value is only known within +/- spread."""
    x = as_sample(sample).values
    rng = make_rng(seed)
    alphas = []
    for _ in range(reps):
        jitter = rng.uniform(x * (1 - spread), x * (1 + spread))
        alphas.append(pareto_mle(jitter, L).alpha_hat)
    alphas = np.asarray(alphas)
    return float(alphas.mean()), float(alphas.std(ddof=1) / math.sqrt(reps))


# ---------------- Maxima ----------------

@dataclass
class FrechetCalibration:
    alpha: float
    L: float
    n: int
    beta: float

    def cdf_max(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.beta ** self.alpha * x ** (-self.alpha))

    def pdf_max(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.alpha, self.beta
        return a * b ** a * x ** (-a - 1) * np.exp(-b ** a * x ** (-a))

    def exact_cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.L, 0.0, (1 - (self.L / np.maximum(x, self.L)) ** self.alpha) ** self.n)

    def exact_pdf(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.maximum(x, self.L)
        tail = (self.L / safe) ** self.alpha
        return np.where(x < self.L, 0.0, self.alpha * self.n * tail * (1 - tail) ** (self.n - 1) / safe)


def frechet_max_calibration(alpha, L, n):
    """Frechet law for the maximum of n Pareto draws: beta = L n^(1/alpha)."""
    if alpha <= 0 or L <= 0 or n < 1:
        raise ParameterError('need alpha > 0, L > 0, n >= 1')
    beta = L * n ** (1 / alpha)
    return FrechetCalibration(alpha=float(alpha), L=float(L), n=int(n), beta=beta)


def gaussian_exact_max_density(n):
    """Density of the maximum of n standard Gaussians: n phi(K) Phi(K)^(n-1)."""
    n = int(n)
    if n < 1:
        raise ParameterError('n must be >= 1, got %r' % n)

    def density(K):
        K = np.asarray(K, dtype=float)
        return n * np.exp(stats.norm.logpdf(K) + (n - 1) * stats.norm.logcdf(K))

    return density


# ---------------- Hidden tail ----------------

def hidden_tail_moment(alpha, L, K, p):
    """E(X^p 1{X > K}) for Pareto(alpha, L): the part of the p-th moment beyond K."""
    _check_tail_args(alpha, L, K, p)
    if p >= alpha:
        raise UndefinedMomentError('the hidden %g-th moment is infinite for alpha=%g' % (p, alpha))
    return alpha * L ** alpha * K ** (p - alpha) / (alpha - p)


def visible_tail_moment(alpha, L, K, p):
    """E(X^p 1{L < X <= K}); the p = alpha case is the log limit."""
    _check_tail_args(alpha, L, K, p)
    if p == alpha:
        return alpha * L ** alpha * math.log(K / L)
    return alpha * (L ** p - L ** alpha * K ** (p - alpha)) / (alpha - p)


def _check_tail_args(alpha, L, K, p):
    if alpha <= 0 or L <= 0:
        raise ParameterError('need alpha > 0 and L > 0')
    if K <= L:
        raise ParameterError('K must exceed L, got K=%r L=%r' % (K, L))
    if p < 0:
        raise ParameterError('moment order must be >= 0, got %r' % p)


def hidden_tail_density(n, p, alpha, L):
    """Density of the hidden p-th moment mass beyond the maximum of n draws (0 <= p < alpha)."""
    if not 0 <= p < alpha:
        raise UndefinedMomentError('hidden moment density needs 0 <= p < alpha')
    if n < 1 or L <= 0:
        raise ParameterError('need n >= 1 and L > 0')
    c = 1 - p / alpha
    k = L ** (alpha * p / (p - alpha)) if p > 0 else 1.0

    def density(z):
        z = np.asarray(z, dtype=float)
        cz = np.maximum(c * z, 0.0)
        with np.errstate(divide='ignore', invalid='ignore'):
            out = n * k * cz ** (p / (alpha - p)) * np.exp(-n * k * cz ** (alpha / (alpha - p)))
        return np.where(z > 0, out, 0.0)

    return density


# ---------------- Stochastic exponent ----------------

def stochastic_alpha_mean(kind, alpha0, spread, b_or_floor=1.0, lambda_scale=1.0):
    """Pareto mean when the exponent itself is random around alpha0.

    lognormal: alpha - b is lognormal with mean alpha0 - b and log-scale `spread`.
    gamma: alpha - 1 is gamma distributed with mean alpha0 - 1 and standard deviation `spread`.
    """
    if lambda_scale <= 0 or spread < 0:
        raise ParameterError('need lambda > 0 and spread >= 0')
    if kind == 'lognormal':
        b = b_or_floor
        if b < 1 or alpha0 <= b:
            raise UndefinedMomentError('lognormal exponent needs alpha0 > b >= 1')
        return lambda_scale * (alpha0 + math.exp(spread ** 2) - b) / (alpha0 - b)
    if kind == 'gamma':
        s = spread
        if alpha0 - 1 <= s:
            raise UndefinedMomentError('gamma exponent needs alpha0 - 1 > s for a finite mean')
        fixed = alpha0 / (alpha0 - 1)
        return lambda_scale * (fixed + s ** 2 / ((alpha0 - 1) * (alpha0 - s - 1) * (alpha0 + s - 1)))
    raise ParameterError("kind must be 'lognormal' or 'gamma', got %r" % kind)


def draw_stochastic_alpha(kind, alpha0, spread, size, seed, b_or_floor=1.0):
    rng = make_rng(seed)
    if kind == 'lognormal':
        b = b_or_floor
        return b + rng.lognormal(math.log(alpha0 - b) - spread ** 2 / 2, spread, size=size)
    if kind == 'gamma':
        shape = (alpha0 - 1) ** 2 / spread ** 2
        return 1 + rng.gamma(shape, spread ** 2 / (alpha0 - 1), size=size)
    raise ParameterError("kind must be 'lognormal' or 'gamma', got %r" % kind)
