"""Tests for `klconc threshold`."""
import json
import math
import unittest

from klconc.management.base import EXIT_SUCCESS, EXIT_VALIDATION
from klconc.tests.test_commands import run_command


class TestThresholdCommand(unittest.TestCase):
    """Rejection thresholds from the command line."""

    def test_sanov(self):
        code, stdout, _ = run_command("threshold", "--n", "2", "--k", "2", "--delta", "0.05", "--method", "sanov")
        self.assertEqual(code, EXIT_SUCCESS)
        document = json.loads(stdout)
        self.assertEqual(document["method"], "sanov")
        self.assertAlmostEqual(document["threshold"], 2 * math.log(60), places=7)

    def test_best(self):
        _, stdout, _ = run_command("threshold", "--n", "10", "--k", "3", "--alpha", "0.2", "--delta", "0.05")
        document = json.loads(stdout)
        self.assertEqual(document["threshold"], min(document["thresholds"].values()))
        self.assertEqual(document["thresholds"][document["method"]], document["threshold"])

    def test_main_not_applicable(self):
        _, stdout, _ = run_command("threshold", "--n", "10", "--k", "3", "--delta", "0.05")
        self.assertIsNone(json.loads(stdout)["thresholds"]["main"])
        code, _, stderr = run_command("threshold", "--n", "10", "--k", "3", "--delta", "0.05", "--method", "main")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("not applicable", stderr)

    def test_bad_delta(self):
        code, _, _ = run_command("threshold", "--n", "10", "--k", "3", "--delta", "1.5")
        self.assertEqual(code, EXIT_VALIDATION)
