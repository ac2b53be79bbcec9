"""Gini index and top-quantile shares for fat-tailed data.

The nonparametric Gini is biased downwards when the variance is infinite. Its finite-sample
law is approximated by a right-skewed stable law; the distance between that law's mode and
its mean is the small-sample correction.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy import special as sc

from .dists import StableParams
from .exceptions import ConvergenceError, InsufficientDataError, ParameterError
from .montecarlo import run_sharded
from .sample import as_sample

logger = logging.getLogger(__name__)

PAIRWISE_LIMIT = 2000


@dataclass
class GiniReport:
    g_np: float
    g_corrected: float
    g_mle: float | None
    alpha_used: float
    gamma_n: float
    mode_shift: float
    n: int = 0

    def as_dict(self):
        return {'g_np': self.g_np, 'g_corrected': self.g_corrected, 'g_mle': self.g_mle,
                'alpha_used': self.alpha_used, 'gamma_n': self.gamma_n,
                'mode_shift': self.mode_shift, 'n': self.n}


@dataclass
class QuantileContribution:
    q: float
    kappa_q_hat: float
    kappa_q_theory: float | None = None
    threshold: float = math.nan

    def as_dict(self):
        return {'q': self.q, 'kappa_q_hat': self.kappa_q_hat,
                'kappa_q_theory': self.kappa_q_theory, 'threshold': self.threshold}


def _positive_values(sample, minimum=2):
    x = as_sample(sample).values
    if np.any(x <= 0):
        raise ParameterError('inequality measures need strictly positive values')
    if x.size < minimum:
        raise InsufficientDataError('need at least %d observations, got %d' % (minimum, x.size))
    return x


# ---------------- Gini ----------------

def gini_nonparametric(sample):
    """sum_{i<j} |x_i - x_j| / ((n - 1) sum x_i), through the order statistics."""
    x = np.sort(_positive_values(sample))
    n = x.size
    i = np.arange(1, n + 1)
    return float(np.dot(2 * i - n - 1, x) / ((n - 1) * x.sum()))


def gini_pairwise(sample):
    x = _positive_values(sample)
    if x.size > PAIRWISE_LIMIT:
        raise ParameterError('pairwise Gini is limited to %d observations' % PAIRWISE_LIMIT)
    diff = np.abs(x[:, None] - x[None, :])
    return float(diff.sum() / 2 / ((x.size - 1) * x.sum()))


def gini_mle_pareto(alpha_hat):
    if alpha_hat <= 0.5:
        raise ParameterError('Gini MLE needs alpha > 1/2, got %r' % alpha_hat)
    return 1 / (2 * alpha_hat - 1)


def gini_mle_stderr(alpha, n):
    if alpha <= 0.5 or n < 1:
        raise ParameterError('need alpha > 1/2 and n >= 1')
    return 2 * alpha / (math.sqrt(n) * (2 * alpha - 1) ** 2)


def _c_alpha(alpha):
    return sc.gamma(2 - alpha) * abs(math.cos(math.pi * alpha / 2)) / (alpha - 1)


def gini_stable_limit(alpha, n, mu=None):
    """Stable law of G_np - g for n Pareto observations with exponent alpha in (1, 2)."""
    if not 1 < alpha < 2:
        raise ParameterError('the stable Gini limit needs alpha in (1, 2), got %r' % alpha)
    if n < 2:
        raise ParameterError('n must be >= 2, got %r' % n)
    if mu is None:
        mu = alpha / (alpha - 1)
    gamma = _c_alpha(alpha) ** (-1 / alpha) / (n ** ((alpha - 1) / alpha) * mu)
    return StableParams(alpha_s=alpha, beta=1.0, mu=0.0, sigma=gamma)


def stable_pdf(x, alpha, beta=1.0, gamma=1.0):
    """Density of S(alpha, beta, gamma, 0) by inverting the characteristic function."""
    if not 1 < alpha <= 2:
        raise ParameterError('stable_pdf supports alpha in (1, 2], got %r' % alpha)
    skew = beta * math.tan(math.pi * alpha / 2)
    upper = 50 ** (1 / alpha)

    def one(v):
        u = v / gamma

        def integrand(t):
            ta = t ** alpha
            return math.exp(-ta) * math.cos(skew * ta - t * u)

        val, _ = integrate.quad(integrand, 0, upper, limit=400)
        return val / (math.pi * gamma)

    if np.ndim(x) == 0:
        return one(float(x))
    return np.array([one(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def stable_mode(alpha, beta=1.0, gamma=1.0):
    """Mode of S(alpha, beta, gamma, 0); scales linearly with gamma."""
    centre = beta * math.tan(math.pi * alpha / 2)
    res = optimize.minimize_scalar(lambda v: -stable_pdf(v, alpha, beta), bounds=(centre - 5, centre + 5),
                                   method='bounded', options={'xatol': 1e-9})
    if not res.success:
        raise ConvergenceError('stable mode search failed', diagnostics={'alpha': alpha, 'beta': beta})
    if abs(res.x - (centre - 5)) < 1e-6 or abs(res.x - (centre + 5)) < 1e-6:
        raise ConvergenceError('stable mode on the search boundary',
                               diagnostics={'alpha': alpha, 'beta': beta, 'x': float(res.x)})
    return float(res.x) * gamma


def gini_corrected(sample, alpha, mu=None, alpha_hat=None):
    """Nonparametric Gini shifted by |mode| of its approximating stable law."""
    x = _positive_values(sample)
    g_np = gini_nonparametric(x)
    params = gini_stable_limit(alpha, x.size, mu=mu)
    mode = stable_mode(alpha, 1.0, params.sigma)
    shift = abs(mode)
    logger.debug('gini correction alpha=%g n=%d gamma=%.6g shift=%.6g', alpha, x.size, params.sigma, shift)
    return GiniReport(
        g_np=g_np,
        g_corrected=g_np + shift,
        g_mle=gini_mle_pareto(alpha_hat) if alpha_hat is not None else None,
        alpha_used=float(alpha),
        gamma_n=params.sigma,
        mode_shift=shift,
        n=int(x.size),
    )


# ---------------- Quantile contribution ----------------

def kappa_q_theory(alpha, q):
    if alpha <= 1:
        raise ParameterError('top share needs alpha > 1, got %r' % alpha)
    if not 0 < q < 1:
        raise ParameterError('q must lie in (0, 1), got %r' % q)
    return q ** ((alpha - 1) / alpha)


def _top_share(x, q):
    n = x.size
    k = max(int(math.ceil(q * n - 1e-9)), 1)
    ordered = np.sort(x)[::-1]
    # exactly k order statistics, so ties at the threshold are split
    return float(ordered[:k].sum() / x.sum()), float(ordered[k - 1])


def quantile_contribution(sample, q, alpha=None):
    """Share of the total held by the top q fraction of observations.

    The top group is exactly ceil(q n) order statistics. Values tied at the threshold are split,
    so n equal values give a share of k/n rather than 1.
    """
    if not 0 < q < 1:
        raise ParameterError('q must lie in (0, 1), got %r' % q)
    x = _positive_values(sample, minimum=1)
    share, threshold = _top_share(x, q)
    theory = kappa_q_theory(alpha, q) if alpha is not None else None
    return QuantileContribution(q=float(q), kappa_q_hat=share, kappa_q_theory=theory, threshold=threshold)


def superadditivity_check(samples, q):
    """(sum-weighted average of subsample top shares, pooled top share)."""
    if len(samples) < 2:
        raise ParameterError('need at least two subsamples')
    parts = [_positive_values(s, minimum=1) for s in samples]
    totals = np.array([p.sum() for p in parts])
    shares = np.array([_top_share(p, q)[0] for p in parts])
    weighted = float(np.dot(totals / totals.sum(), shares))
    pooled = _top_share(np.concatenate(parts), q)[0]
    return weighted, pooled


# ---------------- Monte Carlo ----------------

def _gini_shard(rng, size, dist, n):
    draws = dist.sample(rng, size * n).reshape(size, n)
    draws.sort(axis=1)
    i = np.arange(1, n + 1)
    return draws @ (2 * i - n - 1) / ((n - 1) * draws.sum(axis=1))


def simulate_gini(dist, n, reps, seed, workers=1):
    """Nonparametric Gini of `reps` independent samples of size n."""
    if n < 2 or reps < 1:
        raise ParameterError('need n >= 2 and reps >= 1')
    shard = max(1, 10 ** 6 // n)
    return np.concatenate(run_sharded(_gini_shard, seed, reps, args=(dist, int(n)), workers=workers,
                                      shard_size=shard))


def _top_share_shard(rng, size, dist, n, q):
    k = max(int(math.ceil(q * n - 1e-9)), 1)
    draws = dist.sample(rng, size * n).reshape(size, n)
    top = -np.partition(-draws, k - 1, axis=1)[:, :k]
    return top.sum(axis=1) / draws.sum(axis=1)


def simulate_kappa_q(dist, n, q, reps, seed, workers=1):
    """Empirical top-q share of `reps` independent samples of size n."""
    if not 0 < q < 1 or reps < 1:
        raise ParameterError('need q in (0, 1) and reps >= 1')
    shard = max(1, 10 ** 6 // n)
    return np.concatenate(run_sharded(_top_share_shard, seed, reps, args=(dist, int(n), q),
                                      workers=workers, shard_size=shard))
