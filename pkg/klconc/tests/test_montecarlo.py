"""Tests for the seeded Monte Carlo estimators."""
import math
import unittest

import numpy as np

from klconc.bounds import subgamma_tail_eps
from klconc.core_math import g_func, z_statistic
from klconc.exact_law import enumerate_law, law_coverage, law_moment, law_tail
from klconc.exceptions import DomainError, NumericOverflowError
from klconc.models import Counts, SubGammaParams, geometric, uniform
from klconc.montecarlo import (
    mc_coverage,
    mc_log_mgf,
    mc_moment,
    mc_tail,
    mgf_regime,
    sample_counts,
    sample_statistic,
    statistic_from_counts,
)
from klconc.utils import canonical_json

LOG2 = math.log(2.0)
SEED = 42
DRAWS = 10**5


class TestSampling(unittest.TestCase):
    """Raw draws."""

    def test_statistic_matches_kernel(self):
        p = geometric(3)
        counts = sample_counts(7, p, 50, seed=3)
        self.assertEqual(counts.shape, (50, 3))
        self.assertTrue(np.all(counts.sum(axis=1) == 7))
        z = statistic_from_counts(counts, p)
        for row, value in zip(counts, z):
            self.assertAlmostEqual(value, z_statistic(Counts(counts=row), p), delta=1e-12)

    def test_threads_do_not_change_draws(self):
        p = geometric(4)
        single = sample_statistic(20, p, 1000, seed=9, threads=1, block_size=128)
        pooled = sample_statistic(20, p, 1000, seed=9, threads=4, block_size=128)
        self.assertEqual(single.tobytes(), pooled.tobytes())

    def test_seed_changes_draws(self):
        p = geometric(4)
        first, second = sample_statistic(20, p, 100, seed=1), sample_statistic(20, p, 100, seed=2)
        self.assertNotEqual(first.tobytes(), second.tobytes())

    def test_rejects_empty_run(self):
        with self.assertRaises(DomainError):
            sample_statistic(5, uniform(2), 0, seed=0)

    def test_rejects_seed_outside_64_bits(self):
        for seed in (-1, 2**64):
            with self.assertRaises(DomainError):
                sample_statistic(2, uniform(2), 10, seed)
            with self.assertRaises(DomainError):
                sample_counts(2, uniform(2), 10, seed)

    def test_marginal_means(self):
        p = geometric(4)
        n = 20
        totals = sample_counts(n, p, DRAWS, seed=SEED).sum(axis=0)
        for total, mass in zip(totals, p.probs):
            expected = DRAWS * n * mass
            self.assertLessEqual(abs(total - expected), 5 * math.sqrt(expected * (1.0 - mass)))


class TestEstimators(unittest.TestCase):
    """Estimates on the two-atom law n=2, k=2, uniform p."""

    @classmethod
    def setUpClass(cls):
        cls.p = uniform(2)
        cls.samples = sample_statistic(2, cls.p, DRAWS, SEED)

    def test_tail(self):
        estimate = mc_tail(2, self.p, 1.0, DRAWS, SEED, samples=self.samples)
        self.assertEqual(estimate.samples, DRAWS)
        self.assertTrue(estimate.within(law_tail(enumerate_law(2, self.p), 1.0), 5))
        self.assertEqual(mc_tail(2, self.p, 0.0, DRAWS, SEED, samples=self.samples).estimate, 1.0)

    def test_tail_reproducible(self):
        first = mc_tail(2, self.p, 1.0, 5000, SEED)
        second = mc_tail(2, self.p, 1.0, 5000, SEED, threads=3)
        self.assertEqual(canonical_json(first.to_dict()), canonical_json(second.to_dict()))

    def test_moments(self):
        raw = mc_moment(2, self.p, 1, False, DRAWS, SEED, samples=self.samples)
        self.assertTrue(raw.within(2 * LOG2, 5))
        centered = mc_moment(2, self.p, 1, True, DRAWS, SEED, samples=self.samples)
        self.assertTrue(centered.within(0.0, 5))
        second = mc_moment(2, self.p, 2, True, DRAWS, SEED, samples=self.samples)
        self.assertAlmostEqual(second.estimate, (2 * LOG2) ** 2, places=12)
        with self.assertRaises(DomainError):
            mc_moment(2, self.p, 0, False, DRAWS, SEED, samples=self.samples)

    def test_log_mgf(self):
        self.assertEqual(mc_log_mgf(2, self.p, 0.0, DRAWS, SEED, samples=self.samples).estimate, 0.0)
        expected = math.log(math.cosh(0.5 * LOG2))
        estimate = mc_log_mgf(2, self.p, 0.25, DRAWS, SEED, samples=self.samples, enforce_regime=False)
        self.assertTrue(estimate.within(expected, 5))
        mirrored = mc_log_mgf(2, self.p, -0.25, DRAWS, SEED, samples=self.samples, enforce_regime=False)
        spread = 5 * math.hypot(estimate.std_error, mirrored.std_error)
        self.assertLessEqual(abs(estimate.estimate - mirrored.estimate), spread)

    def test_log_mgf_regime(self):
        self.assertAlmostEqual(mgf_regime(2, 0.5), 1.0 / 3456.0, places=15)
        with self.assertRaises(DomainError):
            mc_log_mgf(2, self.p, 0.25, DRAWS, SEED, samples=self.samples)
        inside = mc_log_mgf(2, self.p, 1e-4, DRAWS, SEED, samples=self.samples)
        self.assertGreaterEqual(inside.estimate, -5 * inside.std_error)

    def test_log_mgf_overflow(self):
        with self.assertRaises(NumericOverflowError):
            mc_log_mgf(2, self.p, 1000.0, DRAWS, SEED, samples=self.samples, enforce_regime=False)

    def test_log_mgf_needs_samples(self):
        with self.assertRaises(DomainError):
            mc_log_mgf(2, self.p, 1e-4, 10, SEED)

    def test_coverage(self):
        self.assertEqual(mc_coverage(2, self.p, 0.1, DRAWS, SEED, samples=self.samples).estimate, 1.0)
        collapsed = mc_coverage(2, self.p, 0.1, DRAWS, SEED, params=SubGammaParams(nu=0.0, c=0.0), samples=self.samples)
        self.assertEqual(collapsed.estimate, 0.0)
        wide = mc_coverage(2, self.p, 0.1, DRAWS, SEED, params=SubGammaParams(nu=0.0, c=10.0), samples=self.samples)
        self.assertEqual(wide.estimate, 1.0)
        with self.assertRaises(DomainError):
            mc_coverage(2, self.p, 1.0, DRAWS, SEED, samples=self.samples)


class TestFidelity(unittest.TestCase):
    """Monte Carlo against the exact law on a larger enumerable instance."""

    def test_against_exact(self):
        p = geometric(3, 0.8)
        law = enumerate_law(12, p)
        samples = sample_statistic(12, p, DRAWS, SEED)
        for t in (1.0, 3.0, 6.0):
            self.assertTrue(mc_tail(12, p, t, DRAWS, SEED, samples=samples).within(law_tail(law, t), 5))
        for q in (1, 2):
            estimate = mc_moment(12, p, q, False, DRAWS, SEED, samples=samples)
            self.assertTrue(estimate.within(law_moment(law, q), 5))

    def test_seeded_replications_agree_with_exact(self):
        p = geometric(3, 0.8)
        exact = law_tail(enumerate_law(12, p), 3.0)
        agreeing = sum(mc_tail(12, p, 3.0, 2000, seed).within(exact, 5) for seed in range(100))
        self.assertGreaterEqual(agreeing, 99)

    def test_coverage_against_exact(self):
        p = geometric(3, 0.8)
        params = SubGammaParams(nu=0.5, c=0.0)
        eps = subgamma_tail_eps(params, 0.1)
        exact = law_coverage(enumerate_law(12, p), 2.0 * g_func(12, p), eps)
        self.assertTrue(0.05 < exact < 0.95)
        estimate = mc_coverage(12, p, 0.1, DRAWS, SEED, params=params)
        self.assertTrue(estimate.within(exact, 5))
