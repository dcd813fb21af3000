"""Tests for `klconc bound`."""
import json
import unittest

from klconc.management.base import EXIT_SUCCESS, EXIT_VALIDATION
from klconc.models import BOUND_CSV_HEADER
from klconc.tests.test_commands import run_command


def _entries(document):
    return {entry["name"]: entry for entry in document["entries"]}


class TestBoundCommand(unittest.TestCase):
    """Tail bounds from the command line."""

    def test_sanov(self):
        code, stdout, _ = run_command("bound", "--n", "2", "--k", "2", "--alpha", "0.5", "--t", "8.1886891")
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertAlmostEqual(_entries(json.loads(stdout))["sanov"]["value"], 0.05, places=7)

    def test_zero_threshold(self):
        _, stdout, _ = run_command("bound", "--n", "2", "--k", "2", "--alpha", "0.5", "--t", "0")
        self.assertEqual(json.loads(stdout)["best"]["value"], 1.0)

    def test_agrawal_boundary(self):
        _, stdout, _ = run_command("bound", "--n", "4", "--k", "2", "--alpha", "0.5", "--t", "2")
        agrawal = _entries(json.loads(stdout))["agrawal"]
        self.assertTrue(agrawal["applicable"])
        self.assertEqual(agrawal["value"], 1.0)

    def test_inapplicable_main_is_inf(self):
        _, stdout, _ = run_command("bound", "--n", "4", "--k", "3", "--t", "1")
        main = _entries(json.loads(stdout))["main"]
        self.assertFalse(main["applicable"])
        self.assertEqual(main["value"], "inf")

    def test_csv(self):
        _, stdout, _ = run_command("bound", "--n", "2", "--k", "2", "--alpha", "0.5", "--t", "3", "--format", "csv")
        header, _ = stdout.strip().split("\r\n")
        self.assertEqual(header, ",".join(BOUND_CSV_HEADER))

    def test_table(self):
        _, stdout, _ = run_command("bound", "--n", "2", "--k", "2", "--alpha", "0.5", "--t", "3", "--format", "table")
        self.assertTrue(stdout.startswith("bound"))
        self.assertIn("best (", stdout)

    def test_missing_threshold(self):
        code, _, _ = run_command("bound", "--n", "2", "--k", "2")
        self.assertEqual(code, EXIT_VALIDATION)

    def test_negative_threshold(self):
        code, _, _ = run_command("bound", "--n", "2", "--k", "2", "--t=-1")
        self.assertEqual(code, EXIT_VALIDATION)
