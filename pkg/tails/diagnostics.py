"""Diagnostics on raw series: do moments converge, is there memory, where is the tail."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import stats

from .exceptions import DegenerateError, InsufficientDataError, ParameterError
from .montecarlo import make_rng
from .sample import Sample, as_sample
from .special import harmonic, harmonic2

logger = logging.getLogger(__name__)

LOW_CONFIDENCE_COUNT = 20

__all__ = [
    'Sample', 'MsCurve', 'ms_plot', 'max_moment_contribution', 'raw_kurtosis',
    'kurtosis_under_aggregation', 'excess_conditional_expectation', 'gumbel_records',
    'subrecords', 'max_drawdown', 'reshuffle', 'autocorrelation', 'zipf_curve', 'zipf_fit',
    'mean_excess_curve', 'mad_std_ratio',
]


@dataclass
class MsCurve:
    p: float
    n: np.ndarray
    ratios: np.ndarray

    def pairs(self):
        return list(zip(self.n.tolist(), self.ratios.tolist()))

    @property
    def final(self):
        return float(self.ratios[-1])


@dataclass
class ExcessEntry:
    K: float
    phi: float
    count: int
    low_confidence: bool


@dataclass
class RecordsResult:
    count: int
    expected: float
    stderr: float
    times: list

    def __iter__(self):
        return iter((self.count, self.expected, self.stderr))


# ---------------- Moment convergence ----------------

def ms_plot(sample, p):
    """Running max-to-sum ratio of |x|^p."""
    if p <= 0:
        raise ParameterError('MS plot order must be > 0, got %r' % p)
    y = np.abs(as_sample(sample).values) ** p
    peak = np.maximum.accumulate(y)
    total = np.cumsum(y)
    ratios = np.divide(peak, total, out=np.zeros_like(total), where=total > 0)
    return MsCurve(p=float(p), n=np.arange(1, y.size + 1), ratios=ratios)


def max_moment_contribution(sample, p=4):
    """Share of the largest |x|^p in the whole sum of |x|^p."""
    y = np.abs(as_sample(sample).values) ** p
    total = y.sum()
    if total <= 0:
        raise DegenerateError('all values are zero')
    return float(y.max() / total)


def raw_kurtosis(values):
    values = np.asarray(values, dtype=float)
    centred = values - values.mean()
    var = np.mean(centred ** 2)
    if var <= 0:
        raise DegenerateError('zero variance')
    return float(np.mean(centred ** 4) / var ** 2)


def kurtosis_under_aggregation(sample, lags):
    """Raw kurtosis of non-overlapping k-sums, one entry (lag, kurtosis) per lag."""
    values = as_sample(sample).values
    out = []
    for lag in lags:
        lag = int(lag)
        if lag < 1:
            raise ParameterError('lags must be >= 1, got %r' % lag)
        blocks = values.size // lag
        if blocks < 2:
            raise InsufficientDataError('lag %d leaves fewer than two blocks' % lag)
        sums = values[:blocks * lag].reshape(blocks, lag).sum(axis=1)
        out.append((lag, raw_kurtosis(sums)))
    return out


def mad_std_ratio(sample):
    values = as_sample(sample).values
    mad = np.mean(np.abs(values - values.mean()))
    if mad <= 0:
        raise DegenerateError('zero mean absolute deviation')
    return float(values.std() / mad)


# ---------------- Tail conditional expectations ----------------

def excess_conditional_expectation(sample, ks, side='right'):
    """phi_K = E(X | X > K) / K (or E(X | X < K) / K on the left side)."""
    if side not in ('right', 'left'):
        raise ParameterError("side must be 'right' or 'left', got %r" % side)
    values = as_sample(sample).values
    out = []
    for K in ks:
        if K == 0:
            raise ParameterError('threshold 0 has no relative excess')
        tail = values[values > K] if side == 'right' else values[values < K]
        count = int(tail.size)
        phi = float(tail.mean() / K) if count else math.nan
        low = count < LOW_CONFIDENCE_COUNT
        if low:
            logger.warning('threshold %g has only %d exceedances', K, count)
        out.append(ExcessEntry(K=float(K), phi=phi, count=count, low_confidence=low))
    return out


def mean_excess_curve(sample, thresholds):
    values = as_sample(sample).values
    out = []
    for u in thresholds:
        tail = values[values > u]
        out.append((float(u), float((tail - u).mean()) if tail.size else math.nan, int(tail.size)))
    return out


# ---------------- Records ----------------

def _record_times(values):
    running = np.maximum.accumulate(values)
    new = np.empty(values.size, dtype=bool)
    new[0] = True
    new[1:] = values[1:] > running[:-1]
    return np.flatnonzero(new)


def gumbel_records(sample):
    """Record count with its i.i.d. expectation H_t and standard error sqrt(H_t - H_t^(2))."""
    values = as_sample(sample).values
    t = values.size
    times = _record_times(values)
    h1 = harmonic(t)
    var = h1 - harmonic2(t)
    return RecordsResult(count=int(times.size), expected=h1, stderr=math.sqrt(max(var, 0.0)),
                         times=times.tolist())


def subrecords(sample):
    """Record count of running minima."""
    values = as_sample(sample).values
    return gumbel_records(Sample(-values, name='-%s' % getattr(sample, 'name', 'sample')))


# ---------------- Drawdowns ----------------

def max_drawdown(sample, window):
    """Worst forward excursion within `window` points from each start index, floored at 0.

    Price series are used as given; return series (is_returns) are cumulated into a log path.
    """
    sample = as_sample(sample)
    window = int(window)
    if window < 2:
        raise ParameterError('window must be >= 2, got %r' % window)
    path = sample.values
    if sample.is_returns:
        path = np.concatenate(([0.0], np.cumsum(path)))
    if path.size < window:
        raise InsufficientDataError('series of %d points is shorter than window %d' % (path.size, window))
    frames = sliding_window_view(path, window)
    worst = frames[:, 1:].min(axis=1) - frames[:, 0]
    return np.minimum(worst, 0.0)


# ---------------- Memory ----------------

def reshuffle(sample, seed):
    sample = as_sample(sample)
    perm = make_rng(seed).permutation(sample.values)
    return sample.with_values(perm, suffix='shuffled')


def autocorrelation(sample, lags):
    values = as_sample(sample).values
    centred = values - values.mean()
    denom = np.dot(centred, centred)
    if denom <= 0:
        raise DegenerateError('zero variance')
    out = []
    for lag in lags:
        lag = int(lag)
        if not 0 <= lag < values.size:
            raise ParameterError('lag %r out of range' % lag)
        out.append((lag, float(np.dot(centred[:values.size - lag], centred[lag:]) / denom)))
    return out


# ---------------- Zipf plots ----------------

def zipf_curve(sample):
    """(log x, log empirical survival) for the positive values, largest first."""
    values = np.sort(as_sample(sample).values)[::-1]
    values = values[values > 0]
    if values.size == 0:
        raise InsufficientDataError('no positive values for a Zipf plot')
    ranks = np.arange(1, values.size + 1)
    return np.log(values), np.log(ranks / values.size)


def zipf_fit(sample, top_fraction=0.1):
    """Slope and R^2 of the log-log survival over the top fraction of positive values."""
    log_x, log_s = zipf_curve(sample)
    k = max(int(round(top_fraction * log_x.size)), 3)
    if k > log_x.size:
        raise InsufficientDataError('need at least 3 positive values')
    fit = stats.linregress(log_x[:k], log_s[:k])
    return float(fit.slope), float(fit.rvalue ** 2)
