"""Tests for `klconc exact`."""
import json
import math
import unittest

from klconc.management.base import EXIT_CAP_EXCEEDED, EXIT_SUCCESS, EXIT_VALIDATION
from klconc.tests.test_commands import run_command


class TestExactCommand(unittest.TestCase):
    """Exact law from the command line."""

    def test_tail_and_mean(self):
        code, stdout, _ = run_command("exact", "--n", "2", "--k", "2", "--p", "0.5,0.5", "--t", "1")
        self.assertEqual(code, EXIT_SUCCESS)
        document = json.loads(stdout)
        self.assertAlmostEqual(document["tail"], 0.5, places=12)
        self.assertAlmostEqual(document["mean"], 2 * math.log(2), places=7)
        self.assertAlmostEqual(document["two_g"], document["mean"], places=10)
        self.assertEqual(document["support_size"], 3)
        self.assertEqual(document["atoms"], 2)

    def test_tail_at_zero(self):
        _, stdout, _ = run_command("exact", "--n", "2", "--p", "0.5,0.5", "--t", "0")
        self.assertEqual(json.loads(stdout)["tail"], 1.0)

    def test_moments_and_atoms(self):
        _, stdout, _ = run_command(
            "exact", "--n", "2", "--p", "0.5,0.5", "--moment", "1", "--moment", "2", "--centered", "--atoms"
        )
        document = json.loads(stdout)
        self.assertAlmostEqual(document["moments"]["1"], 0.0, delta=1e-12)
        self.assertAlmostEqual(document["moments"]["2"], (2 * math.log(2)) ** 2, places=12)
        self.assertEqual(len(document["law"]), 2)

    def test_csv(self):
        _, stdout, _ = run_command("exact", "--n", "3", "--k", "3", "--p-shape", "uniform", "--format", "csv")
        header, row = stdout.strip().split("\r\n")
        self.assertTrue(header.startswith("n,k,support_size,atoms,mean"))
        self.assertTrue(row.startswith("3,3,10,"))

    def test_cap_exceeded(self):
        code, stdout, stderr = run_command("exact", "--n", "100", "--k", "6", "--p-shape", "uniform")
        self.assertEqual(code, EXIT_CAP_EXCEEDED)
        self.assertEqual(stdout, "")
        self.assertIn(str(math.comb(105, 5)), stderr)

    def test_validation(self):
        code, _, stderr = run_command("exact", "--n", "2", "--p", "0.5,0.6")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("CommandError", stderr)
        code, _, _ = run_command("exact", "--p", "0.5,0.5")
        self.assertEqual(code, EXIT_VALIDATION)
