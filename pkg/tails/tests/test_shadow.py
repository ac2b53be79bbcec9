import math

import numpy as np
from django.test import SimpleTestCase
from scipy import integrate

from tails import dists, shadow
from tails.exceptions import DomainError, InsufficientDataError, ParameterError
from tails.montecarlo import make_rng
from tails.sample import Sample
from tails.tailfit import gpd_logpdf


def conditional_mean_by_quadrature(spec, alpha, sigma, u=None):
    """E(Y | Y > u) as y(w_u) + integral of y'(w) S(w) / S(w_u) over the dual excess."""
    H = spec.H
    w_u = 0.0 if u is None else -H * math.log((H - u) / (H - spec.Lstar))
    s_u = w_u / H
    survival_u = (1 + w_u / (alpha * sigma)) ** -alpha

    def integrand(s):
        return (H - spec.Lstar) * math.exp(-s) * (1 + H * s / (alpha * sigma)) ** -alpha / survival_u

    scale = alpha * sigma / H
    points = [s_u + scale * k for k in (1, 10, 100) if scale * k < 50]
    body, _ = integrate.quad(integrand, s_u, s_u + 50, points=points, limit=400)
    start = H - (H - spec.Lstar) * math.exp(-s_u)
    return start + body


class DualMapTests(SimpleTestCase):
    spec = shadow.DualSpec(L=1.0, H=100.0, Lstar=1.0)

    def test_inverse(self):
        y = np.array([1.0, 2.0, 50.0, 99.0, 99.999])
        np.testing.assert_allclose(shadow.dual_inverse(shadow.dual_transform(y, self.spec), self.spec), y,
                                   rtol=1e-12)
        self.assertEqual(shadow.dual_transform(1.0, self.spec), 1.0)

    def test_unbounded_near_h(self):
        near = shadow.dual_transform(100.0 - 1e-9, self.spec)
        self.assertGreater(near, 2000.0)
        self.assertGreater(shadow.dual_transform(100.0 - 1e-12, self.spec), near)

    def test_domain(self):
        with self.assertRaises(DomainError):
            shadow.dual_transform(100.0, self.spec)
        with self.assertRaises(DomainError):
            shadow.dual_transform(0.5, self.spec)
        with self.assertRaises(DomainError):
            shadow.dual_inverse(0.5, self.spec)

    def test_spec_validation(self):
        with self.assertRaises(ParameterError):
            shadow.DualSpec(L=0.0, H=10.0, Lstar=1.0)
        with self.assertRaises(ParameterError):
            shadow.DualSpec(L=1.0, H=1.0, Lstar=1.0)
        with self.assertRaises(ParameterError):
            shadow.DualSpec(L=1.0, H=10.0, Lstar=10.0)


class ShadowMomentTests(SimpleTestCase):
    def test_mean_against_quadrature(self):
        spec = shadow.DualSpec(L=1.0, H=100.0, Lstar=1.0)
        for alpha in (0.5, 1.5, 3.0):
            for sigma in (0.5, 1.0, 10.0):
                with self.subTest(alpha=alpha, sigma=sigma):
                    closed = shadow.shadow_mean(spec, alpha, sigma)
                    oracle = conditional_mean_by_quadrature(spec, alpha, sigma)
                    self.assertAlmostEqual(closed / oracle, 1.0, delta=1e-6)
                    self.assertTrue(spec.Lstar <= closed <= spec.H)

    def test_large_h_matches_unbounded_lomax(self):
        spec = shadow.DualSpec(L=1.0, H=1e6, Lstar=1.0)
        alpha, sigma = 2.0, 1.0
        self.assertAlmostEqual(shadow.shadow_mean(spec, alpha, sigma) / (1 + alpha * sigma / (alpha - 1)), 1.0,
                               delta=0.01)

    def test_monotone_in_sigma_and_xi(self):
        spec = shadow.DualSpec(L=1.0, H=1000.0, Lstar=5.0)
        by_sigma = [shadow.shadow_mean(spec, 0.8, s) for s in (0.5, 1, 2, 5, 20)]
        self.assertTrue(all(a < b for a, b in zip(by_sigma, by_sigma[1:])))
        by_alpha = [shadow.shadow_mean(spec, a, 2.0) for a in (3.0, 2.0, 1.2, 0.8, 0.4)]
        self.assertTrue(all(a < b for a, b in zip(by_alpha, by_alpha[1:])))

    def test_quantile_inverts_cdf(self):
        spec = shadow.DualSpec(L=1.0, H=500.0, Lstar=2.0)
        levels = [0.0, 0.1, 0.5, 0.9, 0.99]
        qs = [shadow.shadow_quantile(p, spec, 0.7, 3.0) for p in levels]
        self.assertEqual(qs[0], 2.0)
        self.assertTrue(all(a < b for a, b in zip(qs, qs[1:])))
        for p, q in zip(levels[1:], qs[1:]):
            self.assertAlmostEqual(shadow.dual_cdf(q, spec, 0.7, 3.0), p, places=10)
        self.assertLessEqual(shadow.shadow_quantile(0.999999, spec, 0.7, 3.0), 500.0)
        with self.assertRaises(DomainError):
            shadow.shadow_quantile(1.0, spec, 0.7, 3.0)

    def test_density_is_derivative_of_cdf(self):
        spec = shadow.DualSpec(L=1.0, H=200.0, Lstar=1.0)
        for y in (1.5, 10.0, 150.0, 199.0):
            h = 1e-6 * y
            slope = (shadow.dual_cdf(y + h, spec, 0.6, 2.0) - shadow.dual_cdf(y - h, spec, 0.6, 2.0)) / (2 * h)
            self.assertAlmostEqual(shadow.dual_pdf(y, spec, 0.6, 2.0) / slope, 1.0, delta=1e-5)
        self.assertEqual(shadow.dual_pdf(0.5, spec, 0.6, 2.0), 0.0)

    def test_expected_shortfall(self):
        spec = shadow.DualSpec(L=1.0, H=1000.0, Lstar=1.0)
        alpha, sigma = 0.6, 2.0
        self.assertAlmostEqual(shadow.shadow_expected_shortfall(1.0, spec, alpha, sigma),
                               shadow.shadow_mean(spec, alpha, sigma), places=10)
        for u in (10.0, 500.0, 990.0):
            with self.subTest(u=u):
                closed = shadow.shadow_expected_shortfall(u, spec, alpha, sigma)
                self.assertAlmostEqual(closed / conditional_mean_by_quadrature(spec, alpha, sigma, u), 1.0,
                                       delta=1e-6)
                self.assertTrue(u <= closed <= spec.H)
        grid = np.linspace(1.0, 999.0, 50)
        es = [shadow.shadow_expected_shortfall(u, spec, alpha, sigma) for u in grid]
        self.assertTrue(all(a <= b for a, b in zip(es, es[1:])))
        with self.assertRaises(DomainError):
            shadow.shadow_mean_excess(0.5, spec, alpha, sigma)

    def test_parameter_checks(self):
        spec = shadow.DualSpec(L=1.0, H=10.0, Lstar=1.0)
        with self.assertRaises(ParameterError):
            shadow.shadow_mean(spec, 0.0, 1.0)
        with self.assertRaises(ParameterError):
            shadow.shadow_mean(spec, 1.0, -1.0)


class LomaxViewTests(SimpleTestCase):
    def test_bounded_mean_against_quadrature(self):
        alpha, sigma, L, H = 0.53, 84260.0, 1e4, 7.2e9
        c = sigma / H

        def integrand(s):
            # Lomax variable written as sigma (e^s - 1)
            return -alpha * math.exp(-alpha * s) * math.expm1(-c * math.expm1(s))

        lift, _ = integrate.quad(integrand, 0, 60, points=[-math.log(c)], limit=400)
        oracle = L + (H - L) * lift
        self.assertAlmostEqual(shadow.lomax_bounded_mean(L, H, sigma, alpha) / oracle, 1.0, delta=1e-6)

    def test_heaviside_against_quadrature(self):
        L, H, sigma = 1.0, 50.0, 2.0
        span = H - L
        for alpha in (0.8, 1.0, 2.5):
            with self.subTest(alpha=alpha):
                def density(t):
                    return alpha / sigma * (1 + t / sigma) ** (-alpha - 1)

                mass = 1 - (1 + span / sigma) ** -alpha
                first, _ = integrate.quad(lambda t: t * density(t), 0, span, limit=200)
                expected = L + first / mass
                self.assertAlmostEqual(shadow.heaviside_conditional_mean(L, H, sigma, alpha) / expected, 1.0,
                                       delta=1e-7)

    def test_heaviside_is_continuous_at_one(self):
        at = shadow.heaviside_conditional_mean(1.0, 50.0, 2.0, 1.0)
        near = shadow.heaviside_conditional_mean(1.0, 50.0, 2.0, 1.0 + 1e-7)
        self.assertAlmostEqual(at, near, places=4)

    def test_large_h_limits(self):
        L, sigma, alpha = 1.0, 2.0, 3.0
        unbounded = L + sigma / (alpha - 1)
        self.assertAlmostEqual(shadow.lomax_bounded_mean(L, 1e7, sigma, alpha) / unbounded, 1.0, delta=1e-3)
        self.assertAlmostEqual(shadow.heaviside_conditional_mean(L, 1e7, sigma, alpha) / unbounded, 1.0,
                               delta=1e-3)


class RescaleTests(SimpleTestCase):
    def test_constant_population_is_identity(self):
        raw = Sample([10.0, 200.0, 3000.0])
        out = shadow.rescale_series(raw, [5e6, 5e6, 5e6], 5e6)
        np.testing.assert_allclose(out.values, raw.values)

    def test_naive_rescale(self):
        out = shadow.rescale_series([10.0, 20.0], [1e6, 4e6], 8e6)
        np.testing.assert_allclose(out.values, [80.0, 40.0])
        with self.assertRaises(ParameterError):
            shadow.rescale_series([10.0, 20.0], [1e6], 8e6)
        with self.assertRaises(ParameterError):
            shadow.rescale_series([10.0], [0.0], 8e6)

    def test_smooth_close_to_naive_far_below_h(self):
        spec = shadow.DualSpec(L=1e4, H=7.2e9, Lstar=1e4)
        raw = Sample(np.geomspace(1e4, 1e6, 30))
        smooth = shadow.smooth_rescale(raw, spec)
        np.testing.assert_allclose(smooth.values, raw.values, rtol=1e-3)
        self.assertTrue(np.all(smooth.values >= raw.values))


class FitTests(SimpleTestCase):
    spec = shadow.DualSpec(L=1.0, H=1e7, Lstar=1.0)
    alpha, sigma = 0.7, 5.0

    def synthetic(self, n=2000, seed=1):
        return Sample(shadow.dual_gpd_sample(make_rng(seed), n, self.spec, self.alpha, self.sigma))

    def test_recovers_dual_parameters(self):
        res = shadow.fit_shadow(self.synthetic(), self.spec)
        self.assertLess(abs(1 / res.alpha - 1 / self.alpha), 3 * res.xi_stderr)
        self.assertAlmostEqual(res.sigma / self.sigma, 1.0, delta=0.25)
        self.assertEqual(res.ratio, res.shadow_mean / res.sample_mean)
        self.assertTrue(self.spec.Lstar <= res.shadow_mean <= self.spec.H)

    def test_fit_maximises_the_direct_likelihood(self):
        y = self.synthetic(seed=2).values
        res = shadow.fit_shadow(y, self.spec)
        best = shadow.dual_loglik(y, self.spec, res.alpha, res.sigma)
        for da, ds in ((1.02, 1.0), (0.98, 1.0), (1.0, 1.02), (1.0, 0.98)):
            self.assertLess(shadow.dual_loglik(y, self.spec, res.alpha * da, res.sigma * ds), best)

    def test_likelihoods_differ_by_a_constant(self):
        y = self.synthetic(n=300, seed=3).values
        w = shadow.dual_transform(y, self.spec) - 1.0
        gaps = [shadow.dual_loglik(y, self.spec, a, s) - float(np.sum(gpd_logpdf(w, 1 / a, s)))
                for a, s in ((0.7, 5.0), (1.5, 2.0), (0.4, 9.0))]
        self.assertAlmostEqual(gaps[0], gaps[1], delta=1e-6 * abs(gaps[0]))
        self.assertAlmostEqual(gaps[0], gaps[2], delta=1e-6 * abs(gaps[0]))

    def test_needs_exceedances(self):
        with self.assertRaises(InsufficientDataError):
            shadow.fit_shadow([0.5, 2.0, 3.0], shadow.DualSpec(L=0.1, H=100.0, Lstar=1.0))
        with self.assertRaises(DomainError):
            shadow.fit_shadow([2.0, 3.0, 4.0, 150.0], shadow.DualSpec(L=0.1, H=100.0, Lstar=1.0))

    def test_bootstrap_is_stable(self):
        spec = self.spec
        y = Sample(shadow.dual_gpd_sample(make_rng(4), 2000, spec, 0.9, self.sigma))
        one = shadow.bootstrap_shadow(y, spec, reps=20, seed=5, workers=1)
        two = shadow.bootstrap_shadow(y, spec, reps=20, seed=5, workers=2)
        self.assertEqual(one, two)
        self.assertTrue(np.all(np.isfinite(one['shadow_mean'])))
        self.assertLess(one['shadow_cv'], 0.15)

    def test_perturbed_refits(self):
        y = self.synthetic(seed=6)
        base = shadow.fit_shadow(y, self.spec)
        out = shadow.perturbed_shadow(y, self.spec, spread=0.01, reps=10, seed=7)
        self.assertEqual(out['reps'], 10)
        self.assertAlmostEqual(out['alpha_mean'] / base.alpha, 1.0, delta=0.1)
        with self.assertRaises(ParameterError):
            shadow.perturbed_shadow(y, self.spec, spread=1.0)

    def test_threshold_choice(self):
        x = dists.sample(dists.ParetoI(2.5), 10 ** 5, 8)
        u, table = shadow.choose_threshold(x, [1.0, 1.5, 2.0, 3.0])
        self.assertIn(u, [1.0, 1.5, 2.0, 3.0])
        for _, slope, count in table:
            self.assertAlmostEqual(slope, 1 / 1.5, delta=0.2)
            self.assertGreaterEqual(count, 30)
        with self.assertRaises(InsufficientDataError):
            shadow.choose_threshold(x, [1.0], min_exceed=10 ** 6)


class _FixedUniforms:
    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def random(self, size=None):
        return self.values[:size]


class ConflictCalibrationTests(SimpleTestCase):
    """Dual GPD fitted to rescaled conflict casualties above 50k: xi 1.8718, beta 14.3254 (in 10k)."""
    spec = shadow.DualSpec(L=1e4, H=7.2e9, Lstar=5e4)
    alpha, sigma = 1 / 1.8718, 143254.0

    def test_extreme_draws_stay_below_the_bound(self):
        u = [0.5, 1 - 1e-9, 1 - 1e-12, 1 - 2.0 ** -53]
        y = shadow.dual_gpd_sample(_FixedUniforms(u), 4, self.spec, self.alpha, self.sigma)
        self.assertTrue(np.all(y < self.spec.H))
        self.assertEqual(y[-1], np.nextafter(self.spec.H, self.spec.Lstar))
        self.assertTrue(np.all(np.isfinite(shadow.dual_transform(y, self.spec))))
        draws = shadow.dual_gpd_sample(make_rng(3), 10 ** 5, self.spec, self.alpha, self.sigma)
        self.assertTrue(np.all((draws >= self.spec.Lstar) & (draws < self.spec.H)))

    def test_small_excesses_keep_precision(self):
        u = np.array([1e-6, 1e-3])
        y = shadow.dual_gpd_sample(_FixedUniforms(u), 2, self.spec, self.alpha, self.sigma)
        w = self.alpha * self.sigma * ((1 - u) ** (-1 / self.alpha) - 1)
        np.testing.assert_allclose(y - self.spec.Lstar, w * (self.spec.H - self.spec.Lstar) / self.spec.H,
                                   rtol=1e-6)

    def test_refit_on_every_simulated_history(self):
        rng = make_rng(16)
        for _ in range(60):
            y = shadow.dual_gpd_sample(rng, 524, self.spec, self.alpha, self.sigma)
            with self.assertLogs('tails.shadow', 'INFO'):
                res = shadow.fit_shadow(y, self.spec)
            self.assertTrue(self.spec.Lstar < res.shadow_mean < self.spec.H)

    def test_shadow_to_sample_ratio(self):
        # 50 events put the typical sample mean near 8e6 against a shadow mean of 3.0e7
        true_mean = shadow.shadow_mean(self.spec, self.alpha, self.sigma)
        self.assertAlmostEqual(true_mean / 3.0042e7, 1.0, delta=0.01)
        rng = make_rng(2016)
        shadows, means = [], []
        with self.assertLogs('tails.shadow', 'INFO'):
            for _ in range(1000):
                y = shadow.dual_gpd_sample(rng, 50, self.spec, self.alpha, self.sigma)
                res = shadow.fit_shadow(y, self.spec)
                shadows.append(res.shadow_mean)
                means.append(res.sample_mean)
        ratio = np.median(shadows) / np.median(means)
        self.assertGreaterEqual(ratio, 3.0)
        self.assertLessEqual(ratio, 4.0)
