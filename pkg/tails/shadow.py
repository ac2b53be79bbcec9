"""Shadow moments of bounded variables whose data look infinite-mean.

A variable Y on [L, H) is mapped to the unbounded dual Z = phi(Y) = L - H log((H - Y)/(H - L)).
Excesses of Z above phi(L*) are modelled as GPD with shape 1/alpha and scale sigma; the
moments of Y are then recovered in closed form through the inverse map.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import ConvergenceError, DomainError, InsufficientDataError, ParameterError
from .montecarlo import make_rng, run_sharded
from .sample import Sample, as_sample
from .special import exponential_integral, upper_incomplete_gamma_scaled
from .tailfit import gpd_fit_mle

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DualSpec:
    L: float
    H: float
    Lstar: float

    def __post_init__(self):
        if not self.L > 0:
            raise ParameterError('lower bound L must be > 0, got %r' % self.L)
        if not self.H > self.L:
            raise ParameterError('upper bound H must exceed L, got H=%r L=%r' % (self.H, self.L))
        if not self.L <= self.Lstar < self.H:
            raise ParameterError('threshold L* must lie in [L, H), got %r' % self.Lstar)


@dataclass
class ShadowResult:
    alpha: float
    sigma: float
    shadow_mean: float
    sample_mean: float
    ratio: float
    n_exceed: int = 0
    xi_stderr: float = math.nan

    def as_dict(self):
        return {'alpha': self.alpha, 'sigma': self.sigma, 'shadow_mean': self.shadow_mean,
                'sample_mean': self.sample_mean, 'ratio': self.ratio, 'n_exceed': self.n_exceed,
                'xi_stderr': self.xi_stderr}


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def _check_params(alpha, sigma):
    if not alpha > 0:
        raise ParameterError('alpha must be > 0, got %r' % alpha)
    if not sigma > 0:
        raise ParameterError('sigma must be > 0, got %r' % sigma)


# ---------------- The dual map ----------------

def dual_transform(y, spec):
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < spec.L) or np.any(y_arr >= spec.H):
        raise DomainError('values must lie in [%g, %g)' % (spec.L, spec.H))
    z = spec.L - spec.H * np.log((spec.H - y_arr) / (spec.H - spec.L))
    return _scalar_or_array(y, z)


def dual_inverse(z, spec):
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < spec.L):
        raise DomainError('dual values must be >= %g' % spec.L)
    y = (spec.L - spec.H) * np.exp((spec.L - z_arr) / spec.H) + spec.H
    return _scalar_or_array(z, y)


def _excess(y, spec):
    # phi(y) - phi(L*), independent of the anchor L
    return -spec.H * np.log((spec.H - y) / (spec.H - spec.Lstar))


def dual_pdf(y, spec, alpha, sigma):
    """Density of Y on [L*, H) when the dual excess is GPD(1/alpha, sigma)."""
    _check_params(alpha, sigma)
    y_arr = np.asarray(y, dtype=float)
    inside = (y_arr >= spec.Lstar) & (y_arr < spec.H)
    safe = np.where(inside, y_arr, spec.Lstar)
    w = _excess(safe, spec)
    out = spec.H / (sigma * (spec.H - safe)) * (1 + w / (alpha * sigma)) ** (-alpha - 1)
    return _scalar_or_array(y, np.where(inside, out, 0.0))


def dual_cdf(y, spec, alpha, sigma):
    _check_params(alpha, sigma)
    y_arr = np.asarray(y, dtype=float)
    safe = np.clip(y_arr, spec.Lstar, np.nextafter(spec.H, 0))
    w = _excess(safe, spec)
    out = 1 - (1 + w / (alpha * sigma)) ** (-alpha)
    out = np.where(y_arr >= spec.H, 1.0, np.where(y_arr <= spec.Lstar, 0.0, out))
    return _scalar_or_array(y, out)


def dual_loglik(y, spec, alpha, sigma):
    """Log-likelihood of observations above L* under the direct density of Y."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide='ignore'):
        return float(np.sum(np.log(dual_pdf(y, spec, alpha, sigma))))


# ---------------- Shadow moments ----------------

def _conditional_mean_above(u, spec, alpha, sigma):
    # E(Y | Y > u): the excess above phi(u) is again GPD with scale sigma + w_u / alpha
    w_u = float(_excess(u, spec))
    c_u = alpha * sigma / spec.H + w_u / spec.H
    return u + (spec.H - u) * upper_incomplete_gamma_scaled(1 - alpha, c_u)


def shadow_mean(spec, alpha, sigma):
    """E(Y | Y > L*), finite for every alpha > 0 since Y is bounded by H."""
    _check_params(alpha, sigma)
    return _conditional_mean_above(spec.Lstar, spec, alpha, sigma)


def shadow_quantile(p, spec, alpha, sigma):
    _check_params(alpha, sigma)
    if not 0 <= p < 1:
        raise DomainError('quantile level must lie in [0, 1), got %r' % p)
    c = alpha * sigma / spec.H
    return spec.H - (spec.H - spec.Lstar) * math.exp(c - c * (1 - p) ** (-1 / alpha))


def shadow_mean_excess(u, spec, alpha, sigma):
    """e_u = E(Y - u | Y > u)."""
    _check_params(alpha, sigma)
    if not spec.Lstar <= u < spec.H:
        raise DomainError('u must lie in [L*, H), got %r' % u)
    return _conditional_mean_above(u, spec, alpha, sigma) - u


def shadow_expected_shortfall(u, spec, alpha, sigma):
    return shadow_mean_excess(u, spec, alpha, sigma) + u


# ---------------- Rescaling ----------------

def rescale_series(raw, populations, today_pop):
    """Naive rescaling x_t * today_pop / pop_t."""
    raw = as_sample(raw)
    pops = as_sample(populations, name='population').values
    if pops.size != len(raw):
        raise ParameterError('need one population figure per observation (%d vs %d)'
                             % (pops.size, len(raw)))
    if np.any(pops <= 0) or not today_pop > 0:
        raise ParameterError('populations must be > 0')
    return raw.with_values(raw.values * (today_pop / pops), suffix='rescaled')


def smooth_rescale(sample, spec):
    sample = as_sample(sample)
    return sample.with_values(dual_transform(sample.values, spec), suffix='dual')


# ---------------- Whole-range Lomax views ----------------

def lomax_bounded_mean(L, H, sigma, alpha):
    """Mean of Y on [L, H] when phi(Y) - L is Lomax(alpha, sigma)."""
    DualSpec(L, H, L)
    _check_params(alpha, sigma)
    c = sigma / H
    if c < 500:
        scaled = math.exp(c) * exponential_integral(alpha + 1, c)
    else:
        scaled = upper_incomplete_gamma_scaled(-alpha, c) / c
    return alpha * H * (1 / alpha - (H - L) * scaled / H)


def heaviside_conditional_mean(L, H, sigma, alpha):
    """Mean of a Lomax(alpha, sigma) variable on [L, inf) truncated at H."""
    DualSpec(L, H, L)
    _check_params(alpha, sigma)
    if alpha == 1:
        span = H - L
        T = 1 + span / sigma
        return L + sigma * (math.log(T) + 1 / T - 1) * (sigma + span) / span
    num = alpha * sigma ** alpha * (H - L) / (sigma ** alpha - (H - L + sigma) ** alpha)
    return (num + (alpha - 1) * L + sigma) / (alpha - 1)


# ---------------- Fitting pipeline ----------------

def fit_shadow(sample, spec):
    """Dual-transform the data, fit a GPD above phi(L*) and report the shadow mean."""
    y = as_sample(sample).values
    y = y[(y > spec.Lstar)]
    if np.any(y >= spec.H):
        raise DomainError('observations must stay below H=%g' % spec.H)
    if y.size < 3:
        raise InsufficientDataError('need at least 3 observations above L*=%g' % spec.Lstar)
    w = _excess(y, spec)
    fit = gpd_fit_mle(Sample(w, name='dual excess'), 0.0)
    if fit.xi <= 0:
        raise ConvergenceError('dual tail is not heavy (xi=%g)' % fit.xi,
                               diagnostics=fit.as_dict())
    alpha = 1 / fit.xi
    sigma = fit.beta
    mean = shadow_mean(spec, alpha, sigma)
    sample_mean = float(y.mean())
    logger.info('shadow fit above %g: alpha=%.4f sigma=%.6g shadow=%.6g sample=%.6g',
                spec.Lstar, alpha, sigma, mean, sample_mean)
    return ShadowResult(alpha=alpha, sigma=sigma, shadow_mean=mean, sample_mean=sample_mean,
                        ratio=mean / sample_mean, n_exceed=fit.n_exceed, xi_stderr=fit.stderrs[0])


def dual_gpd_sample(rng, n, spec, alpha, sigma):
    """Draws of Y above L* whose dual excess is GPD(1/alpha, sigma)."""
    u = rng.random(size=n)
    w = alpha * sigma * ((1 - u) ** (-1 / alpha) - 1)
    y = spec.Lstar - (spec.H - spec.Lstar) * np.expm1(-w / spec.H)
    # once w / H passes ~37 the gap to H is below one ulp; keep such draws inside the support
    return np.minimum(y, np.nextafter(spec.H, spec.Lstar))


def choose_threshold(sample, candidates, min_exceed=30, tolerance=0.2):
    """Lowest candidate beyond which the mean-excess slope stops moving.

    For each candidate u the mean-excess curve above u is regressed on a grid of its own
    exceedance quantiles; the first u whose slope agrees with the next candidate's within
    `tolerance` (relative) is returned with the slope table.
    """
    values = as_sample(sample).values
    table = []
    for u in sorted(candidates):
        tail = values[values > u]
        if tail.size < min_exceed:
            break
        grid = np.quantile(tail, np.linspace(0, 0.9, 10))
        grid[0] = u
        excess = [float((tail[tail > t] - t).mean()) for t in grid]
        slope = float(stats.linregress(grid, excess).slope)
        table.append((float(u), slope, int(tail.size)))
    if not table:
        raise InsufficientDataError('no candidate threshold leaves %d exceedances' % min_exceed)
    for (u, slope, _), (_, nxt, _) in zip(table, table[1:]):
        if abs(slope - nxt) <= tolerance * max(abs(nxt), 1e-12):
            return u, table
    logger.warning('mean-excess slope never stabilised; using the highest usable threshold')
    return table[-1][0], table


def _bootstrap_shard(rng, size, y, spec, fraction):
    out = []
    m = max(int(round(fraction * y.size)), 3)
    for _ in range(size):
        sub = rng.choice(y, size=m, replace=False)
        try:
            res = fit_shadow(sub, spec)
            out.append((res.shadow_mean, res.sample_mean, res.alpha))
        except (InsufficientDataError, ConvergenceError):
            out.append((math.nan, float(sub[sub > spec.Lstar].mean()), math.nan))
    return np.asarray(out, dtype=float).reshape(-1, 3)


def bootstrap_shadow(sample, spec, reps=20, fraction=0.9, seed=0, workers=1):
    """Shadow and sample means over subsamples drawn without replacement."""
    y = as_sample(sample).values
    chunks = run_sharded(_bootstrap_shard, seed, reps, args=(y, spec, fraction), workers=workers,
                         shard_size=10)
    draws = np.concatenate(chunks)
    ok = draws[np.isfinite(draws[:, 0])]
    if ok.shape[0] < 2:
        raise ConvergenceError('shadow bootstrap refits failed')

    def cv(col):
        return float(col.std(ddof=1) / abs(col.mean()))

    return {
        'reps': int(reps),
        'failed': int(draws.shape[0] - ok.shape[0]),
        'shadow_mean': ok[:, 0].tolist(),
        'sample_mean': draws[:, 1].tolist(),
        'alpha': ok[:, 2].tolist(),
        'shadow_cv': cv(ok[:, 0]),
        'sample_cv': cv(draws[:, 1]),
    }


def perturbed_shadow(sample, spec, spread=0.1, reps=50, seed=0):
    """Refit the dual tail with each observation moved uniformly within +/- spread of itself.

    Values are kept inside [L, H). Returns the mean and spread of alpha and the shadow mean.
    """
    if not 0 < spread < 1:
        raise ParameterError('spread must lie in (0, 1), got %r' % spread)
    y = as_sample(sample).values
    rng = make_rng(seed)
    top = np.nextafter(spec.H, spec.L)
    alphas, means = [], []
    for _ in range(reps):
        jitter = np.clip(rng.uniform(y * (1 - spread), y * (1 + spread)), spec.L, top)
        try:
            res = fit_shadow(jitter, spec)
        except (InsufficientDataError, ConvergenceError):
            continue
        alphas.append(res.alpha)
        means.append(res.shadow_mean)
    if len(alphas) < 2:
        raise ConvergenceError('perturbed refits failed', diagnostics={'reps': reps, 'spread': spread})
    alphas, means = np.asarray(alphas), np.asarray(means)
    return {'reps': int(reps), 'failed': int(reps - alphas.size), 'spread': float(spread),
            'alpha_mean': float(alphas.mean()), 'alpha_std': float(alphas.std(ddof=1)),
            'shadow_mean': float(means.mean()), 'shadow_std': float(means.std(ddof=1))}
