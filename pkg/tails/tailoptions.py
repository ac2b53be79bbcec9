"""Option pricing in the power-law tail.

Beyond the Karamata point the price of a deep out-of-the-money option depends only on the
tail exponent and one constant l, which a single anchor price pins down. Everything else
about the distribution of the underlying drops out.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import ConvergenceError, ParameterError
from .montecarlo import run_sharded
from .sample import as_sample

logger = logging.getLogger(__name__)

SIDES = ('call_on_price', 'call_on_return', 'put_on_return')


@dataclass(frozen=True)
class TailPricingSpec:
    alpha: float
    anchor_strike: float
    anchor_price: float
    spot: float = 1.0
    side: str = 'call_on_price'
    approximate: bool = False

    def __post_init__(self):
        if not self.alpha > 1:
            raise ParameterError('tail pricing needs alpha > 1, got %r' % self.alpha)
        if not self.anchor_price > 0:
            raise ParameterError('anchor price must be > 0, got %r' % self.anchor_price)
        if not self.spot > 0 or not self.anchor_strike > 0:
            raise ParameterError('spot and anchor strike must be > 0')
        if self.side not in SIDES:
            raise ParameterError('side must be one of %s, got %r' % (', '.join(SIDES), self.side))
        if self.side == 'call_on_return' and self.anchor_strike <= self.spot:
            raise ParameterError('return-mode calls need a strike above spot')
        if self.side == 'put_on_return' and self.anchor_strike >= self.spot:
            raise ParameterError('puts need a strike below spot')


@dataclass
class PriceCurve:
    strikes: list
    prices: list
    implied_l: float
    kind: str = 'call'

    def as_dict(self):
        return {'strikes': list(self.strikes), 'prices': list(self.prices),
                'implied_l': self.implied_l, 'kind': self.kind}


# ---------------- Absolute prices ----------------

def price_call_on_price(K, l, alpha):
    """E(S - K)+ when P(S > s) = (l / s)^alpha above l."""
    return K ** (1 - alpha) * l ** alpha / (alpha - 1)


def price_call_on_return(K, S0, l, alpha):
    """E(S - K)+ when (S - S0)/S0 is Pareto with minimum l."""
    return (l * S0) ** alpha * (K - S0) ** (1 - alpha) / (alpha - 1)


def _put_shape(k, alpha):
    return (k ** (1 - alpha) + (alpha - 1) * k - alpha) / (alpha - 1)


def put_normalization(l, alpha, approximate=False):
    """lambda = 1/(1 - l^alpha) so the truncated return density integrates to one."""
    return 1.0 if approximate else 1 / (1 - l ** alpha)


def price_put_on_return(K, S0, l, alpha, approximate=False):
    """E(K - S)+ with S = (1 - r) S0 and r Pareto(l, alpha) truncated to [l, 1]."""
    if not 0 < l < 1:
        raise ParameterError('put tail constant l must lie in (0, 1), got %r' % l)
    k = (S0 - K) / S0
    return put_normalization(l, alpha, approximate) * l ** alpha * S0 * _put_shape(k, alpha)


# ---------------- Anchored pricing ----------------

def implied_karamata_constant(spec):
    a, K, C, S0 = spec.alpha, spec.anchor_strike, spec.anchor_price, spec.spot
    if spec.side == 'call_on_price':
        return ((a - 1) * C * K ** (a - 1)) ** (1 / a)
    if spec.side == 'call_on_return':
        return ((a - 1) * C) ** (1 / a) * (K - S0) ** (1 - 1 / a) / S0
    ratio = C / (S0 * _put_shape((S0 - K) / S0, a))
    la = ratio if spec.approximate else ratio / (1 + ratio)
    return la ** (1 / a)


def _zone_check(K, spec, l):
    S0 = spec.spot
    if spec.side == 'call_on_price':
        ok, edge = K > l, l
    elif spec.side == 'call_on_return':
        ok, edge = K >= S0 * (1 + l), S0 * (1 + l)
    else:
        ok, edge = K <= S0 * (1 - l), S0 * (1 - l)
    if not ok:
        logger.warning('strike %g is outside the tail zone (edge %g)', K, edge)
    return ok


def price_call(K, spec):
    if spec.side == 'put_on_return':
        raise ParameterError('price_call needs a call-side spec')
    l = implied_karamata_constant(spec)
    _zone_check(K, spec, l)
    if spec.side == 'call_on_price':
        return price_call_on_price(K, l, spec.alpha)
    return price_call_on_return(K, spec.spot, l, spec.alpha)


def relative_call_price(K2, K1, C1, alpha, S0=None):
    """Price at K2 from the price at K1; S0 switches to the return-mode ratio."""
    if S0 is None:
        return (K2 / K1) ** (1 - alpha) * C1
    return ((K2 - S0) / (K1 - S0)) ** (1 - alpha) * C1


def price_put(K2, K1, P1, spec):
    """Put at K2 from the put P1 at K1; l and lambda cancel."""
    S0, a = spec.spot, spec.alpha
    if spec.side == 'put_on_return':
        l = implied_karamata_constant(spec)
        for K in (K1, K2):
            _zone_check(K, spec, l)
    for K in (K1, K2):
        if not 0 <= K < S0:
            raise ParameterError('put strikes must lie in [0, S0), got %r' % K)
    return P1 * _put_shape((S0 - K2) / S0, a) / _put_shape((S0 - K1) / S0, a)


def price_curve(spec, strikes):
    strikes = sorted(float(k) for k in strikes)
    l = implied_karamata_constant(spec)
    if spec.side == 'put_on_return':
        P1 = spec.anchor_price
        prices = [price_put(K, spec.anchor_strike, P1, spec) for K in strikes]
        kind = 'put'
    else:
        prices = [price_call(K, spec) for K in strikes]
        kind = 'call'
    return PriceCurve(strikes=strikes, prices=prices, implied_l=l, kind=kind)


# ---------------- Black-Scholes side and the arbitrage bound ----------------

def _d1_d2(S0, K, sigma, t):
    vol = sigma * math.sqrt(t)
    d1 = (math.log(S0 / K) + vol * vol / 2) / vol
    return d1, d1 - vol


def bs_call(S0, K, sigma, t):
    """Zero-rate Black-Scholes call."""
    if sigma <= 0 or t <= 0:
        raise ParameterError('need sigma > 0 and t > 0')
    d1, d2 = _d1_d2(S0, K, sigma, t)
    return S0 * stats.norm.cdf(d1) - K * stats.norm.cdf(d2)


def bs_strike_slope(S0, K, sigma, sigma_slope, t):
    """dC/dK along the smile: -N(d2) + vega * sigma'(K)."""
    d1, d2 = _d1_d2(S0, K, sigma, t)
    vega = S0 * math.sqrt(t) * stats.norm.pdf(d1)
    return -stats.norm.cdf(d2) + vega * sigma_slope


def _tail_base(K, S0, l, mode):
    if mode == 'return':
        if K <= S0:
            raise ParameterError('return-mode strikes must exceed S0')
        return l * S0 / (K - S0)
    if mode == 'price':
        return l / K
    raise ParameterError("mode must be 'return' or 'price', got %r" % mode)


def call_spread_gap(K, alpha, l, S0, sigma, sigma_slope, t, mode='return'):
    """Tail slope minus Black-Scholes slope at K; negative values open a butterfly arbitrage."""
    tail_slope = -_tail_base(K, S0, l, mode) ** alpha
    return tail_slope - bs_strike_slope(S0, K, sigma, sigma_slope, t)


def min_alpha_no_arbitrage(K, sigma_of_K, sigma_slope, S0, t, l, mode='return'):
    """Smallest alpha for which the tail call curve joins the smile convexly at K."""
    if t <= 0 or sigma_of_K <= 0:
        raise ParameterError('need t > 0 and sigma > 0')
    x = _tail_base(K, S0, l, mode)
    if not 0 < x < 1:
        raise ParameterError('strike %g is not beyond the tail constant (base %g)' % (K, x))
    A = -bs_strike_slope(S0, K, sigma_of_K, sigma_slope, t)
    if A <= 0:
        raise ConvergenceError('Black-Scholes slope is non-negative; no exponent is admissible',
                               diagnostics={'A': A, 'K': K})
    bound = math.log(A) / math.log(x)
    logger.debug('arbitrage bound K=%g sigma=%g slope=%g -> alpha >= %.6g', K, sigma_of_K, sigma_slope, bound)
    return bound


# ---------------- Curve checks ----------------

def curve_diagnostics(curve, tol=None):
    """Negative call spreads, negative butterflies and the implied density of a strike curve."""
    K = np.asarray(curve.strikes, dtype=float)
    P = np.asarray(curve.prices, dtype=float)
    if K.size < 2 or np.any(np.diff(K) <= 0):
        raise ParameterError('curve needs at least two strictly increasing strikes')
    if tol is None:
        tol = 1e-12 * max(float(np.max(np.abs(P))), 1.0)
    sign = 1 if curve.kind == 'call' else -1
    spread_bad = [float(K[i + 1]) for i in range(K.size - 1) if sign * (P[i + 1] - P[i]) > tol]
    slopes = np.diff(P) / np.diff(K)
    density = []
    fly_bad = []
    for i in range(1, K.size - 1):
        dens = 2 * (slopes[i] - slopes[i - 1]) / (K[i + 1] - K[i - 1])
        density.append((float(K[i]), float(dens)))
        if slopes[i] - slopes[i - 1] < -tol:
            fly_bad.append(float(K[i]))
    if spread_bad or fly_bad:
        logger.warning('curve has %d spread and %d butterfly violations', len(spread_bad), len(fly_bad))
    return {
        'spread_violations': spread_bad,
        'butterfly_violations': fly_bad,
        'density': density,
        'negative_density': [k for k, d in density if d < -tol],
        'ok': not (spread_bad or fly_bad),
    }


# ---------------- Data helpers ----------------

def karamata_plateau(sample, alpha, top_fraction=0.2):
    """x^alpha times the empirical survival over the top values; flat where the tail is Paretian."""
    x = np.sort(as_sample(sample).positive())[::-1]
    k = max(int(top_fraction * x.size), 2)
    surv = np.arange(1, x.size + 1) / x.size
    top_x = x[:k]
    L = top_x ** alpha * surv[:k]
    spread = float(np.std(np.log(L)))
    return {'x': top_x.tolist(), 'L': L.tolist(), 'log_spread': spread, 'l_estimate': float(np.median(L)) ** (1 / alpha)}


def _local_zipf_slopes(values, chunk):
    v = np.sort(values)[::-1]
    v = v[v > 0]
    log_x = np.log(v)
    log_s = np.log(np.arange(1, v.size + 1) / v.size)
    slopes = []
    for start in range(0, v.size - chunk + 1, chunk):
        sl = slice(start, start + chunk)
        if np.ptp(log_x[sl]) == 0:
            continue
        slopes.append(float(stats.linregress(log_x[sl], log_s[sl]).slope))
    return slopes


def log_return_zipf_slopes(sample, S0, chunk=200, top=2000):
    """Local Zipf-plot slopes of S and of log(S/S0) over the top observations."""
    s = as_sample(sample).positive()
    s = np.sort(s[s > S0])[::-1][:top]
    if s.size < 2 * chunk:
        raise ParameterError('need at least %d observations above S0' % (2 * chunk))
    return {'price': _local_zipf_slopes(s, chunk), 'log_return': _local_zipf_slopes(np.log(s / S0), chunk)}


# ---------------- Monte Carlo check ----------------

def _payoff_shard(rng, size, spec, l, strikes):
    u = rng.random(size=size)
    a, S0 = spec.alpha, spec.spot
    if spec.side == 'call_on_price':
        S = l * (1 - u) ** (-1 / a)
        pay = np.maximum(S[:, None] - strikes[None, :], 0.0)
    elif spec.side == 'call_on_return':
        S = S0 * (1 + l * (1 - u) ** (-1 / a))
        pay = np.maximum(S[:, None] - strikes[None, :], 0.0)
    else:
        r = l * (1 - u * (1 - l ** a)) ** (-1 / a)
        S = (1 - r) * S0
        pay = np.maximum(strikes[None, :] - S[:, None], 0.0)
    return np.stack((pay.sum(axis=0), (pay ** 2).sum(axis=0)))


def simulate_prices(spec, strikes, paths, seed, workers=1):
    """Monte Carlo option values under the tail law implied by the anchor, with standard errors."""
    strikes = np.asarray(sorted(strikes), dtype=float)
    l = implied_karamata_constant(spec)
    chunks = run_sharded(_payoff_shard, seed, paths, args=(spec, l, strikes), workers=workers)
    totals = np.sum(chunks, axis=0)
    mean = totals[0] / paths
    var = np.maximum(totals[1] / paths - mean ** 2, 0.0)
    return mean.tolist(), np.sqrt(var / paths).tolist()
