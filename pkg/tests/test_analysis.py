import math
import unittest

import mpmath
import numpy as np

from ccnbandit import analysis
from ccnbandit import distributions
from ccnbandit import exceptions
from ccnbandit.simulation import make_rng


# shifted negative binomial moments of the three routers, unbounded
UNTRUNCATED_MEANS = [4.5, 2 + 30 / 7.0, 2 + 40 / 6.0]
UNTRUNCATED_VARIANCES = [3.125, 3 / 0.49, 4 / 0.36]


def truncated_spec(D=15):
    return analysis.ArmGapSpec.from_distributions(distributions.three_routers(truncation=D))


class TestConcentrationInequalities(unittest.TestCase):
    draws = 100000

    def assert_dominates(self, sums, eta, bound):
        """``bound`` is above the simulated tail, up to three standard errors"""
        empirical = np.mean(sums >= eta)
        slack = 3 * math.sqrt(empirical * (1 - empirical) / len(sums))
        self.assertLessEqual(empirical - slack, bound, 'eta={0}'.format(eta))

    def test_bounds_dominate_sums_of_uniforms(self):
        n = 20
        sums = make_rng(99).uniform(-1, 1, size=(self.draws, n)).sum(axis=1)
        V = n / 3.0
        for eta in (1.0, 3.0, 5.0, 8.0):
            self.assert_dominates(sums, eta, analysis.hoeffding_tail(eta, [(-1, 1)] * n))
            self.assert_dominates(sums, eta, analysis.bennett_tail(eta, 1.0, V))
            self.assert_dominates(sums, eta, analysis.bernstein_tail(eta, 1.0, V))
            self.assert_dominates(sums, eta, analysis.azuma_tail(eta, [1.0] * n))

    def test_bounds_dominate_scaled_bernoulli_sums(self):
        # Y_t = c_t (X_t - p) with X_t ~ Bernoulli(p) and unequal scales c_t
        p = 0.3
        scales = np.array([1.0, 2.0, 3.0] * 10)
        flips = make_rng(100).random((self.draws, len(scales))) < p
        sums = ((flips - p) * scales).sum(axis=1)
        ranges = [(-c * p, c * (1 - p)) for c in scales]
        M = scales.max() * (1 - p)
        V = float(np.sum(scales ** 2) * p * (1 - p))
        increments = [c * max(p, 1 - p) for c in scales]
        for eta in (2.0, 6.0, 10.0, 15.0):
            self.assert_dominates(sums, eta, analysis.hoeffding_tail(eta, ranges))
            self.assert_dominates(sums, eta, analysis.bennett_tail(eta, M, V))
            self.assert_dominates(sums, eta, analysis.bernstein_tail(eta, M, V))
            self.assert_dominates(sums, eta, analysis.azuma_tail(eta, increments))

    def test_bounds_dominate_rare_event_counts(self):
        n, p = 100, 0.05
        sums = (make_rng(101).random((self.draws, n)) < p).sum(axis=1) - n * p
        V = n * p * (1 - p)
        bennett, hoeffding = [], []
        for eta in (1.0, 3.0, 5.0, 8.0):
            hoeffding.append(analysis.hoeffding_tail(eta, [(-p, 1 - p)] * n))
            bennett.append(analysis.bennett_tail(eta, 1 - p, V))
            self.assert_dominates(sums, eta, hoeffding[-1])
            self.assert_dominates(sums, eta, bennett[-1])
            self.assert_dominates(sums, eta, analysis.bernstein_tail(eta, 1 - p, V))
            self.assert_dominates(sums, eta, analysis.azuma_tail(eta, [1 - p] * n))
        # small variance: the variance-aware bound wins far in the tail
        self.assertLess(bennett[-1], hoeffding[-1])

    def test_azuma_dominates_a_martingale_with_unequal_increments(self):
        # increments c_s * sign * (1 or 1/2 depending on the current sum) are
        # dependent but have zero conditional mean
        rng = make_rng(102)
        increments = [0.5 * (1 + s % 4) for s in range(30)]
        sums = np.zeros(self.draws)
        for c in increments:
            signs = np.where(rng.random(self.draws) < 0.5, -1.0, 1.0)
            sums += c * signs * np.where(sums > 0, 0.5, 1.0)
        for eta in (3.0, 8.0, 12.0, 18.0):
            self.assert_dominates(sums, eta, analysis.azuma_tail(eta, increments))

    def test_bennett_is_tighter_than_bernstein(self):
        for M in (0.5, 1.0, 4.0):
            for eta in np.logspace(-2, 2, 10):
                for V in np.logspace(-1, 2, 10):
                    self.assertLessEqual(analysis.bennett_tail(eta, M, V),
                                         analysis.bernstein_tail(eta, M, V) + 1e-15)

    def test_hoeffding_value(self):
        self.assertAlmostEqual(analysis.hoeffding_tail(5, [(-1, 1)] * 20), math.exp(-50 / 80.0))
        self.assertAlmostEqual(analysis.hoeffding_tail(2, [(-1, 2), (0, 1), (-3, 0)]), math.exp(-8 / 19.0))
        self.assertEqual(analysis.hoeffding_tail(5, [(2, 2)] * 3), 0.0)

    def test_azuma_value(self):
        self.assertAlmostEqual(analysis.azuma_tail(4, [1, 2, 3]), math.exp(-16 / 28.0))
        self.assertEqual(analysis.azuma_tail(1, [0, 0]), 0.0)

    def test_bennett_function(self):
        self.assertEqual(analysis.bennett_b(0), 1.0)
        cutoff = analysis.BENNETT_SERIES_CUTOFF
        below = analysis.bennett_b(cutoff * (1 - 1e-9))
        above = analysis.bennett_b(cutoff)
        self.assertAlmostEqual(below, above, places=8)
        values = [analysis.bennett_b(lam) for lam in np.linspace(0, 50, 201)]
        self.assertTrue(all(a >= b for a, b in zip(values, values[1:])))
        for lam in np.linspace(0, 50, 201):
            self.assertGreaterEqual(analysis.bennett_b(lam), 1 / (1 + lam / 3.0) - 1e-12)

    def test_bennett_function_against_arbitrary_precision(self):
        mpmath.mp.dps = 40
        for lam in ('0.5', '2', '10'):
            x = mpmath.mpf(lam)
            reference = 2 * ((1 + x) * mpmath.log(1 + x) - x) / x ** 2
            self.assertAlmostEqual(analysis.bennett_b(float(lam)), float(reference), places=13)

    def test_invalid_inputs(self):
        with self.assertRaises(exceptions.DomainError):
            analysis.hoeffding_tail(0, [(-1, 1)])
        with self.assertRaises(exceptions.DomainError):
            analysis.hoeffding_tail(1, [(1, -1)])
        with self.assertRaises(exceptions.DomainError):
            analysis.bennett_tail(1, 1, 0)
        with self.assertRaises(exceptions.DomainError):
            analysis.bennett_b(-0.5)
        with self.assertRaises(exceptions.DomainError):
            analysis.azuma_tail(1, [-1])

    def test_normal_cdf_against_arbitrary_precision(self):
        mpmath.mp.dps = 30
        for x in np.linspace(-5, 5, 21):
            reference = float(mpmath.ncdf(float(x)))
            self.assertLess(abs(analysis.normal_cdf(x) - reference), 1e-12 * reference)


class TestArmGapSpec(unittest.TestCase):

    def test_from_distributions_infers_D(self):
        spec = truncated_spec()
        self.assertEqual(spec.D, 15)
        self.assertEqual(spec.best, 0)
        self.assertEqual(spec.suboptimal, [1, 2])
        self.assertAlmostEqual(spec.gaps[1], 1.76384, delta=1e-5)
        self.assertAlmostEqual(spec.gaps[2], 3.84623, delta=1e-5)
        self.assertIsNone(analysis.ArmGapSpec.from_distributions(distributions.three_routers()).D)

    def test_probabilities(self):
        np.testing.assert_allclose(truncated_spec().probabilities, [1 / 3.0] * 3)
        with self.assertRaises(ValueError):
            analysis.ArmGapSpec([1, 2], [1, 1], probabilities=[0.5, 0.6])

    def test_c_coefficient(self):
        spec = analysis.ArmGapSpec(UNTRUNCATED_MEANS, UNTRUNCATED_VARIANCES, D=15)
        self.assertAlmostEqual(analysis.c_coefficient(spec, 1), 242.857, delta=1e-3)
        with self.assertRaises(exceptions.DomainError):
            analysis.c_coefficient(spec, 0)

    def test_D_is_required(self):
        spec = analysis.ArmGapSpec(UNTRUNCATED_MEANS, UNTRUNCATED_VARIANCES)
        with self.assertRaises(exceptions.DomainError):
            analysis.thm1_success_lower_bound(spec, 100)
        with self.assertRaises(exceptions.DomainError):
            analysis.transient_slots_estimate(spec)


class TestInitialPhase(unittest.TestCase):

    def setUp(self):
        self.spec = truncated_spec()

    def test_round_robin_approximation(self):
        self.assertAlmostEqual(analysis.thm3_success_approx_rr(self.spec, 68), 0.9932, delta=5e-4)

    def test_uniform_approximation(self):
        self.assertAlmostEqual(analysis.thm2_success_approx(self.spec, 68), 0.897, delta=1e-3)
        self.assertAlmostEqual(analysis.thm2_success_approx(self.spec, 100), 0.9605, delta=1e-3)

    def test_approximations_grow_with_t0(self):
        grid = range(16, 400, 7)
        for approximation in (analysis.thm1_success_lower_bound, analysis.thm2_success_approx,
                              analysis.thm3_success_approx_rr):
            values = [approximation(self.spec, t0) for t0 in grid]
            self.assertEqual(values, sorted(values))
            self.assertTrue(all(0 <= v <= 1 for v in values))

    def test_lower_bound_is_conservative(self):
        for t0 in (20, 68, 150, 1000):
            self.assertLessEqual(analysis.thm1_success_lower_bound(self.spec, t0),
                                 analysis.thm2_success_approx(self.spec, t0))

    def test_round_robin_approximation_dominates_uniform(self):
        for t0 in [20, 40, 68, 100, 150] + list(range(16, 400, 7)):
            self.assertGreaterEqual(analysis.thm3_success_approx_rr(self.spec, t0),
                                    analysis.thm2_success_approx(self.spec, t0))
        untruncated = analysis.ArmGapSpec(UNTRUNCATED_MEANS, UNTRUNCATED_VARIANCES, D=15)
        for t0 in (20, 68, 150):
            self.assertGreaterEqual(analysis.thm3_success_approx_rr(untruncated, t0),
                                    analysis.thm2_success_approx(untruncated, t0))

    def test_t0_must_exceed_D(self):
        for function in (analysis.thm1_success_lower_bound, analysis.thm2_success_approx,
                         analysis.thm3_success_approx_rr):
            with self.assertRaises(exceptions.DomainError):
                function(self.spec, 15)

    def test_zero_variance_arms(self):
        spec = analysis.ArmGapSpec([1.0, 2.0], [0.0, 0.0], D=2)
        self.assertEqual(analysis.thm3_success_approx_rr(spec, 3), 1.0)

    def test_transient_estimate(self):
        spec = analysis.ArmGapSpec(UNTRUNCATED_MEANS, UNTRUNCATED_VARIANCES, D=15)
        estimate = analysis.transient_slots_estimate(spec)
        self.assertAlmostEqual(estimate.unrounded, 68.5735, delta=1e-3)
        self.assertEqual(estimate.slots, 69)
        self.assertAlmostEqual(estimate.success_floor, 0.977 ** 2)

    def test_transient_estimate_needs_a_unique_best_arm(self):
        spec = analysis.ArmGapSpec([3.0, 3.0, 4.0], [1.0, 1.0, 1.0], D=5)
        with self.assertRaises(exceptions.DomainError):
            analysis.transient_slots_estimate(spec)


def reference_bound(a, d, D, K, t):
    """Suboptimality bound evaluated term by term with mpmath"""
    a, d, D, K, t = [mpmath.mpf(v) for v in (a, d, D, K, t)]
    x = a * K / (t * d ** 2 * mpmath.sqrt(mpmath.e))
    first = 2 * D * a / d ** 2 * mpmath.log(1 / x) * x ** (3 * a / (14 * d ** 2))
    second = 16 * D ** 3 / d ** 2 * mpmath.exp((D + 1) / 8) * x ** (a / (8 * D ** 2))
    third = a / (d ** 2 * t)
    return min(mpmath.mpf(1), first + second + third)


class TestSuboptimalityBound(unittest.TestCase):

    def test_parameters(self):
        params = analysis.Theorem4Params(1800, 1.76, 15, 3, 1744)
        self.assertAlmostEqual(params.eps0, 5400 / 1.76 ** 2)
        self.assertEqual(params.t, 1744)
        with self.assertRaises(exceptions.DomainError):
            analysis.Theorem4Params(1800, 1.76, 15, 3, 1743)
        with self.assertRaises(exceptions.DomainError):
            analysis.Theorem4Params(1800, 1.76, 15, 3, 1744, t=100)
        with self.assertRaises(exceptions.DomainError):
            analysis.Theorem4Params(1800, 1.76, 15, 1, 1744)
        with self.assertRaises(exceptions.DomainError):
            analysis.Theorem4Params(0, 1.76, 15, 3, 1744)

    def test_from_spec(self):
        spec = truncated_spec()
        params = analysis.Theorem4Params.from_spec(spec, 1800, 2000)
        self.assertAlmostEqual(params.d, spec.min_gap)
        self.assertEqual(params.D, 15)
        with self.assertRaises(exceptions.DomainError):
            analysis.Theorem4Params.from_spec(spec, 1800, 2000, d=1.78)

    def test_bound_matches_arbitrary_precision(self):
        mpmath.mp.dps = 50
        params = analysis.Theorem4Params(1800, 1.76, 15, 3, 1744, t=1e10)
        reference = float(reference_bound(1800, 1.76, 15, 3, 1e10))
        self.assertLess(reference, 1.0)
        self.assertLess(abs(analysis.thm4_suboptimal_prob_bound(params) - reference), 1e-10 * reference)

    def test_bound_is_capped_early_on(self):
        params = analysis.Theorem4Params(1800, 1.76, 15, 3, 1744)
        self.assertEqual(analysis.thm4_suboptimal_prob_bound(params), 1.0)
        self.assertEqual(analysis.thm4_suboptimal_prob_bound(params.at(1e6)), 1.0)

    def test_bound_decays_like_a_over_d_squared_t(self):
        params = analysis.Theorem4Params(64, 1, 2, 2, 129, t=1e8)
        self.assertAlmostEqual(1e8 * analysis.thm4_suboptimal_prob_bound(params), 64, delta=0.05)

    def test_expected_suboptimal_sends_grow_logarithmically(self):
        params = analysis.Theorem4Params(64, 1, 2, 2, 200)
        curve = analysis.thm4_bound_curve(params, np.arange(10 ** 6 + 1, 2 * 10 ** 6 + 1))
        self.assertLessEqual(curve.sum(), 64 * math.log(2) + 1)

    def test_curve_matches_pointwise_bound(self):
        params = analysis.Theorem4Params(64, 1, 2, 2, 200)
        t_grid = [200, 1000, 10 ** 5, 10 ** 7]
        curve = analysis.thm4_bound_curve(params, t_grid)
        for t, value in zip(t_grid, curve):
            self.assertAlmostEqual(value, analysis.thm4_suboptimal_prob_bound(params.at(t)), places=12)
        self.assertTrue(np.all(np.diff(curve) <= 0))

    def test_curve_rejects_slots_before_t0(self):
        params = analysis.Theorem4Params(64, 1, 2, 2, 200)
        with self.assertRaises(exceptions.DomainError):
            analysis.thm4_bound_curve(params, [150, 300])
