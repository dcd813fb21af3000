"""Tests for `klconc mc`."""
import json
import math
import unittest

from klconc.management.base import EXIT_SUCCESS, EXIT_VALIDATION
from klconc.tests.test_commands import run_command

INSTANCE = ("--n", "2", "--p", "0.5,0.5", "--m", "20000", "--seed", "42")


class TestMcCommand(unittest.TestCase):
    """Monte Carlo estimates from the command line."""

    def test_tail(self):
        code, stdout, _ = run_command("mc", *INSTANCE, "--t", "1")
        self.assertEqual(code, EXIT_SUCCESS)
        result = json.loads(stdout)["results"][0]
        self.assertEqual(set(result), {"estimate", "std_error", "samples", "seed", "parameter"})
        self.assertEqual(result["seed"], 42)
        self.assertLessEqual(abs(result["estimate"] - 0.5), 5 * result["std_error"])

    def test_deterministic_across_threads(self):
        _, first, _ = run_command("mc", *INSTANCE, "--t", "1")
        _, second, _ = run_command("mc", *INSTANCE, "--t", "1")
        _, pooled, _ = run_command("mc", *INSTANCE, "--t", "1", "--threads", "4")
        self.assertEqual(first, second)
        self.assertEqual(first, pooled)

    def test_moments(self):
        _, stdout, _ = run_command("mc", *INSTANCE, "--estimator", "moment", "--moment", "1", "--moment", "2")
        results = json.loads(stdout)["results"]
        self.assertEqual([result["parameter"] for result in results], [1, 2])
        self.assertLessEqual(abs(results[0]["estimate"] - 2 * math.log(2)), 5 * results[0]["std_error"])

    def test_log_mgf_regime(self):
        code, _, stderr = run_command("mc", *INSTANCE, "--estimator", "log_mgf", "--t", "0.25")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("enforce_regime", stderr)
        code, stdout, _ = run_command("mc", *INSTANCE, "--estimator", "log_mgf", "--t", "0.25", "--unrestricted-t")
        self.assertEqual(code, EXIT_SUCCESS)
        result = json.loads(stdout)["results"][0]
        expected = math.log(math.cosh(0.5 * math.log(2)))
        self.assertLessEqual(abs(result["estimate"] - expected), 5 * result["std_error"])

    def test_coverage(self):
        _, stdout, _ = run_command("mc", *INSTANCE, "--estimator", "coverage", "--delta", "0.1")
        self.assertGreaterEqual(json.loads(stdout)["results"][0]["estimate"], 0.9)

    def test_csv(self):
        _, stdout, _ = run_command("mc", *INSTANCE, "--t", "1", "--format", "csv")
        header, row = stdout.strip().split("\r\n")
        self.assertEqual(header, "estimator,n,k,parameter,estimate,std_error,samples,seed")
        self.assertTrue(row.startswith("tail,2,2,1.0,"))

    def test_missing_estimator_inputs(self):
        self.assertEqual(run_command("mc", *INSTANCE)[0], EXIT_VALIDATION)
        self.assertEqual(run_command("mc", *INSTANCE, "--estimator", "moment")[0], EXIT_VALIDATION)
        self.assertEqual(run_command("mc", *INSTANCE, "--estimator", "coverage")[0], EXIT_VALIDATION)

    def test_seed_out_of_range(self):
        for seed in ("-1", str(2**64)):
            code, _, stderr = run_command("mc", "--n", "2", "--p", "0.5,0.5", "--m", "200", "--t", "1", "--seed", seed)
            self.assertEqual(code, EXIT_VALIDATION)
            self.assertIn("--seed", stderr)
