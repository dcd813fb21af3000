"""Tests for `klconc verify`."""
import json
import unittest
from unittest import mock

from klconc.management.base import EXIT_SUCCESS, EXIT_VALIDATION, EXIT_VERIFY_FAILED
from klconc.models import VerifyReport
from klconc.tests.test_commands import run_command

SMALL = ("--n-values", "1,2,3", "--k-values", "2,3", "--mc-n-values", "20", "--mc-samples", "500")


class TestVerifyCommand(unittest.TestCase):
    """Property certification from the command line."""

    def test_chain_rule(self):
        code, stdout, _ = run_command("verify", "--property", "chain_rule")
        self.assertEqual(code, EXIT_SUCCESS)
        document = json.loads(stdout)
        self.assertTrue(document["passed"])
        self.assertEqual(document["reports"][0]["cells_checked"], 1000)

    def test_several_properties(self):
        code, stdout, _ = run_command(
            "verify", "--property", "bernstein_mean", "--property", "sanov_dominates", *SMALL
        )
        self.assertEqual(code, EXIT_SUCCESS)
        reports = json.loads(stdout)["reports"]
        self.assertEqual([report["property"] for report in reports], ["bernstein_mean", "sanov_dominates"])

    def test_failure_exit_code(self):
        code, stdout, stderr = run_command(
            "verify", "--property", "raw_moment_growth", "--constant", "C_agrawal_delta=1e-6", *SMALL
        )
        self.assertEqual(code, EXIT_VERIFY_FAILED)
        document = json.loads(stdout)
        self.assertFalse(document["passed"])
        self.assertTrue(document["reports"][0]["failures"])
        self.assertIn("raw_moment_growth", stderr)

    def test_table(self):
        report = VerifyReport(property="chain_rule", cells_checked=3, min_slack=0.5)
        with mock.patch("klconc.management.commands.verify.run_all", return_value=[report]):
            code, stdout, _ = run_command("verify", "--format", "table")
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertEqual(stdout.splitlines()[1].split()[:3], ["chain_rule", "yes", "3"])

    def test_unknown_property(self):
        code, _, _ = run_command("verify", "--property", "nonsense")
        self.assertEqual(code, EXIT_VALIDATION)

    def test_invalid_grid(self):
        code, _, stderr = run_command("verify", "--k-values", "1")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("Invalid grid", stderr)
