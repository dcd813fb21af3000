"""Tests for the property catalogue, on grids small enough for a unit test run."""
import math
import unittest

from klconc.exceptions import DomainError
from klconc.models import ConstantsConfig, GridSpec, ShapeSpec
from klconc.verify import PROPERTIES, binary_mgf, run_all, t_values, verify

SMALL_GRID = GridSpec(
    n_values=tuple(range(1, 7)),
    mc_n_values=(30,),
    k_values=(2, 3),
    p_shapes=(ShapeSpec(name="uniform"), ShapeSpec(name="geometric", param=0.5), ShapeSpec(name="dirichlet", param=1)),
    mc_samples=2000,
    f_n_max=40,
    grad_n_max=60,
    binary_n_max=60,
    binary_p_values=(0.1, 0.5, 0.9),
    g_tail_n_max=2000,
    moment_max=4,
)


class TestCatalogue(unittest.TestCase):
    """Every property passes on a small grid."""

    def test_every_property_passes(self):
        for name in PROPERTIES:
            with self.subTest(property=name):
                report = verify(name, SMALL_GRID)
                self.assertEqual(report.property, name)
                self.assertTrue(report.passed, report.failures[:3])
                self.assertGreater(report.cells_checked, 0)

    def test_chain_rule_uses_a_thousand_instances(self):
        report = verify("chain_rule", SMALL_GRID)
        self.assertEqual(report.cells_checked, 1000)
        self.assertGreaterEqual(report.min_slack, 0.0)

    def test_bernstein_mean_on_acceptance_grid(self):
        report = verify("bernstein_mean", GridSpec(mc_n_values=()))
        self.assertTrue(report.passed)
        self.assertEqual(report.cells_checked, 12 * 3 * 8)

    def test_cap_skips_cells(self):
        report = verify("sanov_dominates", SMALL_GRID.copy(update={"cap": 5, "mc_n_values": ()}))
        self.assertGreater(report.cells_skipped, 0)
        self.assertTrue(report.passed)

    def test_g_tail_respects_size_limit(self):
        report = verify("g_subgaussian_tail", SMALL_GRID)
        self.assertEqual(report.cells_skipped, 2)

    def test_agrawal_skips_small_thresholds(self):
        report = verify("agrawal_dominates", SMALL_GRID)
        self.assertGreater(report.cells_skipped, 0)


class TestAcceptanceGrid(unittest.TestCase):
    """The size-bound properties at the default grid sizes."""

    grid = GridSpec(mc_n_values=())

    def assert_passes(self, name, cells=None):
        report = verify(name, self.grid)
        self.assertTrue(report.passed, report.failures[:3])
        if cells is None:
            self.assertGreater(report.cells_checked, 0)
        else:
            self.assertEqual(report.cells_checked, cells)
        return report

    def test_f_monotone_and_bound_to_500(self):
        self.assert_passes("f_monotone_and_bound", cells=3 * 8 * 500 * 2)

    def test_disc_gradient_to_2000(self):
        # uniform and both geometric shapes, n = 4..2000
        self.assert_passes("disc_gradient", cells=3 * 3 * 1997 * 2)

    def test_binary_mgf_to_2000(self):
        self.assertEqual(self.grid.binary_p_values[0], 0.05)
        self.assertEqual(self.grid.binary_p_values[-1], 0.95)
        self.assert_passes("binary_mgf", cells=19 * 2000)

    def test_g_subgaussian_tail_default_sizes(self):
        self.assert_passes("g_subgaussian_tail")

    def test_raw_moments_to_10(self):
        self.assert_passes("raw_moment_growth", cells=3 * 8 * 12 * 10)


class TestFailures(unittest.TestCase):
    """Violations are reported with the cell that produced them."""

    def test_shrunken_constant_fails(self):
        cfg = ConstantsConfig(C_agrawal_delta=1e-6)
        report = verify("raw_moment_growth", SMALL_GRID, cfg)
        self.assertFalse(report.passed)
        failure = report.failures[0]
        self.assertLess(failure.slack, 0.0)
        self.assertIn("n", failure.cell)
        self.assertIn("m", failure.cell)
        self.assertEqual(report.to_dict()["passed"], False)

    def test_unknown_property(self):
        with self.assertRaises(DomainError):
            verify("no_such_property", SMALL_GRID)


class TestHelpers(unittest.TestCase):
    """Grid helpers and exact binary MGF."""

    def test_t_values(self):
        values = t_values(SMALL_GRID, 2, ConstantsConfig())
        self.assertEqual(len(values), 21)
        self.assertEqual(values[0], 0.0)
        self.assertAlmostEqual(values[-1], 400.0 * (2 + math.log(100.0)), places=9)
        explicit = SMALL_GRID.copy(update={"t_grid": (1.0, 2.0)})
        self.assertEqual(list(t_values(explicit, 2, ConstantsConfig())), [1.0, 2.0])

    def test_binary_mgf(self):
        # n=1: Z = 2 log(1/q) or 2 log(1/(1-q)).
        q = 0.3
        expected = q * math.exp(-0.5 * math.log(q)) + (1 - q) * math.exp(-0.5 * math.log(1 - q))
        self.assertAlmostEqual(binary_mgf(1, q), expected, places=12)

    def test_run_all_order(self):
        reports = run_all(SMALL_GRID, properties=["centering_maps", "chain_rule"])
        self.assertEqual([report.property for report in reports], ["centering_maps", "chain_rule"])

    def test_cg_prime_note(self):
        exact_only = SMALL_GRID.copy(update={"mc_n_values": ()})
        report = verify("main_mgf_envelope", exact_only)
        self.assertTrue(any("Cg_prime" in note for note in report.notes))
        explicit = verify("main_mgf_envelope", exact_only, ConstantsConfig(Cg_prime=1.0))
        self.assertEqual(explicit.notes, ())
