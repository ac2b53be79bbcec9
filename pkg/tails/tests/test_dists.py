import math

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from tails import dists
from tails.diagnostics import raw_kurtosis
from tails.exceptions import DomainError, ParameterError, UndefinedMomentError


def ks_bound(n):
    return 2.0 / math.sqrt(n)


class SamplerTests(SimpleTestCase):
    def test_registry(self):
        self.assertEqual(sorted(dists.DISTRIBUTIONS), sorted([
            'pareto', 'student', 'lognormal', 'stable', 'twostate', 'gaussian', 'exponential',
            'gammavar', 'bimodal']))

    def test_deterministic(self):
        a = dists.sample(dists.ParetoI(1.5), 1000, seed=3).values
        b = dists.sample(dists.ParetoI(1.5), 1000, seed=3).values
        c = dists.sample(dists.ParetoI(1.5), 1000, seed=4).values
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_pareto_support_and_mean(self):
        x = dists.sample(dists.ParetoI(2, 1), 10 ** 5, seed=1).values
        self.assertGreaterEqual(x.min(), 1.0)
        self.assertAlmostEqual(x.mean(), 2.0, delta=0.1)

    def test_samplers_match_their_cdfs(self):
        n = 10 ** 4
        for dist in (dists.ParetoI(1.7, 2.0), dists.StudentT(3, 2.0, 1.0), dists.Lognormal(0.5, 1.2),
                     dists.Gaussian(1.0, 3.0), dists.Exponential(2.5)):
            with self.subTest(dist=dist):
                x = dists.sample(dist, n, seed=21).values
                self.assertLess(stats.kstest(x, dist.cdf).statistic, ks_bound(n))

    def test_student_large_alpha_is_gaussian(self):
        x = dists.sample(dists.StudentT(1e6), 10 ** 5, seed=5).values
        self.assertLess(stats.kstest(x, stats.norm.cdf).statistic, 0.01)

    def test_stable_alpha_two_is_gaussian_with_sd_sqrt2(self):
        x = dists.sample(dists.StableParams(2.0, 0.0, 0.0, 1.0), 10 ** 5, seed=6).values
        self.assertLess(stats.kstest(x, stats.norm(scale=math.sqrt(2)).cdf).statistic, 0.01)

    def test_skewed_stable_matches_its_cf(self):
        dist = dists.StableParams(1.5, 0.5, 0.3, 1.2)
        x = dists.sample(dist, 10 ** 5, seed=8).values
        for t in (0.2, 0.7, 1.5):
            empirical = np.mean(np.exp(1j * t * x))
            self.assertLess(abs(empirical - complex(dist.cf(t))), 0.015)

    def test_stable_cf(self):
        dist = dists.StableParams(1.3, 0.7, 0.2, 2.0)
        self.assertAlmostEqual(complex(dist.cf(0.0)), 1 + 0j)
        self.assertTrue(np.all(np.abs(dist.cf(np.linspace(-5, 5, 101))) <= 1 + 1e-12))

    def test_two_state_preserves_variance(self):
        dist = dists.TwoStateGaussian(sigma=2.0, a=0.5, p=0.5)
        x = dists.sample(dist, 10 ** 6, seed=9).values
        self.assertAlmostEqual(x.var() / 4.0, 1.0, delta=0.01)
        self.assertAlmostEqual(raw_kurtosis(x), dist.kurtosis, delta=0.05)

    def test_validation(self):
        with self.assertRaises(ParameterError):
            dists.ParetoI(0)
        with self.assertRaises(ParameterError):
            dists.StableParams(2.5)
        with self.assertRaises(ParameterError):
            dists.TwoStateGaussian(1.0, 2.0, 0.5)
        with self.assertRaises(ParameterError):
            dists.sample(dists.Gaussian(), 0, seed=1)

    def test_undefined_means(self):
        with self.assertRaises(UndefinedMomentError):
            dists.ParetoI(1.0).mean
        with self.assertRaises(UndefinedMomentError):
            dists.StudentT(1.0).mean
        with self.assertRaises(UndefinedMomentError):
            dists.ParetoI(2.0).moment(2)
        self.assertAlmostEqual(dists.ParetoI(3.0, 2.0).moment(1), 3.0)


class HeuristicTests(SimpleTestCase):
    def test_two_state_kurtosis(self):
        self.assertEqual(dists.two_state_kurtosis(0, 0.5), 3)
        self.assertAlmostEqual(dists.two_state_kurtosis(1 - 1e-9, 0.5), 6, places=6)
        self.assertAlmostEqual(dists.two_state_kurtosis(999, 1 / 1000), 3000, places=6)

    def test_gamma_variance_kurtosis(self):
        dist = dists.GammaVarianceGaussian(b=0.5)
        self.assertEqual(dist.kurtosis, 4.5)
        x = dists.sample(dist, 10 ** 6, seed=10).values
        self.assertAlmostEqual(raw_kurtosis(x), 4.5, delta=0.15)

    def test_mixture_kurtosis(self):
        self.assertAlmostEqual(dists.mixture_kurtosis(1.0, 1.0, 2.0, 2.0), 3.0)
        self.assertAlmostEqual(dists.mixture_kurtosis(3.0, -3.0, 1.0, 1.0), 1.38)
        x = dists.sample(dists.BimodalGaussian(6.0, 1.0), 10 ** 6, seed=12).values
        self.assertAlmostEqual(raw_kurtosis(x), 1.38, delta=0.01)

    def test_mixture_gaussian_separation(self):
        d = dists.mixture_gaussian_separation(1.0, 2.0)
        self.assertAlmostEqual(dists.mixture_kurtosis(d, 0.0, 1.0, 2.0), 3.0, places=10)

    def test_gaussian_crossovers(self):
        np.testing.assert_allclose(dists.gaussian_crossovers(0, 1), [-2.13, -0.66, 0.66, 2.13], atol=0.005)
        np.testing.assert_allclose(dists.gaussian_crossovers(5, 2),
                                   5 + 2 * np.asarray(dists.gaussian_crossovers(0, 1)))

    def test_student_crossovers(self):
        r13 = math.sqrt(13)
        expected = [-math.sqrt(4 + r13), -math.sqrt(4 - r13), math.sqrt(4 - r13), math.sqrt(4 + r13)]
        np.testing.assert_allclose(dists.student_crossovers(3), expected, rtol=1e-12)
        np.testing.assert_allclose(dists.student_crossovers(1e8), dists.gaussian_crossovers(0, 1), rtol=1e-6)

    def test_std_over_mad(self):
        self.assertAlmostEqual(dists.std_over_mad(dists.Gaussian()), 1.2533, places=4)
        self.assertAlmostEqual(dists.std_over_mad(dists.StudentT(3)), math.pi / 2, places=12)
        self.assertAlmostEqual(dists.std_over_mad(dists.ParetoI(3)), 1.9486, places=4)
        with self.assertRaises(UndefinedMomentError):
            dists.std_over_mad(dists.ParetoI(2))

    def test_pareto_std_over_mad_by_simulation(self):
        x = dists.sample(dists.ParetoI(3), 4 * 10 ** 6, seed=13).values
        ratio = x.std() / np.mean(np.abs(x - 1.5))
        self.assertAlmostEqual(ratio / 1.9486, 1.0, delta=0.03)

    def test_stable_mean_abs_dev(self):
        gauss = dists.StableParams(2.0, 0.0, 0.0, 1.0)
        self.assertAlmostEqual(dists.stable_mean_abs_dev(gauss), 2 / math.sqrt(math.pi), places=12)
        self.assertAlmostEqual(dists.stable_mean_abs_dev(dists.StableParams(1.5, 0.6)),
                               dists.stable_mean_abs_dev(dists.StableParams(1.5, -0.6)), places=12)
        with self.assertRaises(DomainError):
            dists.stable_mean_abs_dev(dists.StableParams(1.0))

    def test_stable_mean_abs_dev_by_simulation(self):
        dist = dists.StableParams(1.5, 0.0, 0.0, 1.0)
        x = dists.sample(dist, 4 * 10 ** 6, seed=14).values
        self.assertAlmostEqual(np.mean(np.abs(x)) / dists.stable_mean_abs_dev(dist), 1.0, delta=0.02)
