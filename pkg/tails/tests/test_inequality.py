import math

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from tails import dists, inequality
from tails.exceptions import InsufficientDataError, ParameterError


class GiniTests(SimpleTestCase):
    def test_sorted_formula_matches_pairwise(self):
        x = dists.sample(dists.Lognormal(0.0, 1.0), 400, 1)
        self.assertAlmostEqual(inequality.gini_nonparametric(x), inequality.gini_pairwise(x), places=12)

    def test_equal_incomes(self):
        self.assertEqual(inequality.gini_nonparametric([3.0] * 50), 0.0)

    def test_maximum_likelihood(self):
        self.assertAlmostEqual(inequality.gini_mle_pareto(1.1), 0.8333, places=4)
        self.assertAlmostEqual(inequality.gini_mle_stderr(1.1, 100), 2.2 / (10 * 1.2 ** 2))
        with self.assertRaises(ParameterError):
            inequality.gini_mle_pareto(0.5)

    def test_validation(self):
        with self.assertRaises(ParameterError):
            inequality.gini_nonparametric([1.0, -2.0, 3.0])
        with self.assertRaises(InsufficientDataError):
            inequality.gini_nonparametric([1.0])
        with self.assertRaises(ParameterError):
            inequality.gini_pairwise(np.ones(inequality.PAIRWISE_LIMIT + 1))

    def test_small_sample_bias(self):
        # mean of the nonparametric estimator for Pareto alpha=1.1 at n=1000 is 0.711
        draws = inequality.simulate_gini(dists.ParetoI(1.1), 1000, 2000, seed=2)
        self.assertAlmostEqual(draws.mean(), 0.711, delta=0.01)
        self.assertLess(draws.mean(), inequality.gini_mle_pareto(1.1))


class StableLimitTests(SimpleTestCase):
    def test_density_matches_scipy(self):
        for alpha in (1.2, 1.5, 1.8):
            for x in (-1.0, 0.0, 2.0, 5.0):
                with self.subTest(alpha=alpha, x=x):
                    expected = stats.levy_stable.pdf(x, alpha, 1.0)
                    self.assertAlmostEqual(inequality.stable_pdf(x, alpha) / expected, 1.0, delta=1e-3)

    def test_gaussian_case(self):
        self.assertAlmostEqual(inequality.stable_pdf(0.0, 2.0), 1 / math.sqrt(4 * math.pi), places=8)
        np.testing.assert_allclose(inequality.stable_pdf(np.array([0.5, 1.0]), 2.0, gamma=2.0),
                                   stats.norm.pdf([0.5, 1.0], scale=2 * math.sqrt(2)), rtol=1e-6)

    def test_mode(self):
        mode = inequality.stable_mode(1.5)
        self.assertLess(mode, 0.0)
        peak = inequality.stable_pdf(mode, 1.5)
        self.assertGreater(peak, inequality.stable_pdf(mode - 0.01, 1.5))
        self.assertGreater(peak, inequality.stable_pdf(mode + 0.01, 1.5))
        self.assertAlmostEqual(inequality.stable_mode(1.5, gamma=0.1), 0.1 * mode, places=8)

    def test_scale_shrinks_with_n(self):
        scales = [inequality.gini_stable_limit(1.4, n).sigma for n in (10, 100, 1000, 10000)]
        self.assertTrue(all(a > b for a, b in zip(scales, scales[1:])))
        with self.assertRaises(ParameterError):
            inequality.gini_stable_limit(2.5, 100)

    def test_correction_report(self):
        x = dists.sample(dists.ParetoI(1.5), 500, 3)
        report = inequality.gini_corrected(x, 1.5, alpha_hat=1.5)
        self.assertGreater(report.mode_shift, 0.0)
        self.assertAlmostEqual(report.g_corrected, report.g_np + report.mode_shift)
        self.assertEqual(report.g_mle, 0.5)
        self.assertEqual(report.n, 500)

    def test_correction_improves_small_samples(self):
        for alpha in (1.2, 1.4, 1.6, 1.8):
            truth = inequality.gini_mle_pareto(alpha)
            for n in (10, 50, 200, 1000, 2000):
                with self.subTest(alpha=alpha, n=n):
                    raw = inequality.simulate_gini(dists.ParetoI(alpha), n, 1000, seed=4)
                    shift = inequality.gini_corrected(dists.sample(dists.ParetoI(alpha), n, 5), alpha).mode_shift
                    self.assertLess(np.mean(np.abs(raw + shift - truth)), np.mean(np.abs(raw - truth)))

    def test_simulation_ignores_workers(self):
        one = inequality.simulate_gini(dists.ParetoI(1.3), 1000, 2500, seed=6, workers=1)
        two = inequality.simulate_gini(dists.ParetoI(1.3), 1000, 2500, seed=6, workers=2)
        np.testing.assert_array_equal(one, two)


class QuantileContributionTests(SimpleTestCase):
    def test_theory(self):
        self.assertAlmostEqual(inequality.kappa_q_theory(1.16, 0.01), 0.53, delta=0.005)
        self.assertAlmostEqual(inequality.kappa_q_theory(1.1, 0.01), 0.657933, delta=1e-6)
        with self.assertRaises(ParameterError):
            inequality.kappa_q_theory(1.0, 0.01)

    def test_ties_split_at_the_threshold(self):
        out = inequality.quantile_contribution([2.0] * 1000, 0.01)
        self.assertAlmostEqual(out.kappa_q_hat, 0.01, places=12)
        self.assertEqual(out.threshold, 2.0)

    def test_top_share(self):
        x = np.arange(1.0, 101.0)
        out = inequality.quantile_contribution(x, 0.05, alpha=1.5)
        self.assertAlmostEqual(out.kappa_q_hat, (96 + 97 + 98 + 99 + 100) / 5050)
        self.assertEqual(out.threshold, 96.0)
        self.assertAlmostEqual(out.kappa_q_theory, 0.05 ** (1 / 3))

    def test_downward_bias(self):
        # Pareto alpha=1.1, top 1% at n=1000: mean 0.405, median 0.368
        shares = inequality.simulate_kappa_q(dists.ParetoI(1.1), 1000, 0.01, 2000, seed=7)
        self.assertAlmostEqual(shares.mean(), 0.405, delta=0.015)
        self.assertAlmostEqual(np.median(shares), 0.368, delta=0.02)
        self.assertLess(shares.mean(), inequality.kappa_q_theory(1.1, 0.01))

    def test_bias_shrinks_with_n(self):
        # means 0.486 at n=1e4 and 0.539 at n=1e5, still below 0.658
        rows = ((10 ** 4, 1000, 0.485916), (10 ** 5, 400, 0.539028))
        means = []
        for n, reps, expected in rows:
            with self.subTest(n=n):
                shares = inequality.simulate_kappa_q(dists.ParetoI(1.1), n, 0.01, reps, seed=7)
                self.assertAlmostEqual(shares.mean(), expected, delta=0.02)
                means.append(shares.mean())
        self.assertLess(means[0], means[1])
        self.assertLess(means[1], inequality.kappa_q_theory(1.1, 0.01))

    def test_superadditivity(self):
        x = dists.sample(dists.ParetoI(1.2), 10000, 8).values
        weighted, pooled = inequality.superadditivity_check(np.split(x, 10), 0.01)
        self.assertLessEqual(weighted, pooled)
        with self.assertRaises(ParameterError):
            inequality.superadditivity_check([x], 0.01)

    def test_simulation_ignores_workers(self):
        one = inequality.simulate_kappa_q(dists.ParetoI(1.5), 500, 0.02, 4500, seed=9, workers=1)
        two = inequality.simulate_kappa_q(dists.ParetoI(1.5), 500, 0.02, 4500, seed=9, workers=2)
        np.testing.assert_array_equal(one, two)
