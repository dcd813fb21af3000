"""Tests for the top-level dispatcher."""
import unittest
from io import StringIO
from unittest import mock

from django.core.management.base import BaseCommand

from klconc import __version__
from klconc.management import COMMANDS, execute_from_command_line, load_command_class
from klconc.management.base import EXIT_SUCCESS, EXIT_VALIDATION


class TestDispatcher(unittest.TestCase):
    """klconc <subcommand>."""

    def test_help(self):
        stdout = StringIO()
        self.assertEqual(execute_from_command_line(["klconc"], stdout=stdout), 0)
        for name in COMMANDS:
            self.assertIn(name, stdout.getvalue())

    def test_version(self):
        stdout = StringIO()
        self.assertEqual(execute_from_command_line(["klconc", "--version"], stdout=stdout), 0)
        self.assertEqual(stdout.getvalue(), f"{__version__}\n")

    def test_unknown_subcommand(self):
        stderr = StringIO()
        self.assertEqual(execute_from_command_line(["klconc", "frobnicate"], stderr=stderr), 1)
        self.assertIn("frobnicate", stderr.getvalue())

    def test_color_flags_conflict(self):
        stderr = StringIO()
        argv = ["klconc", "bound", "--n", "2", "--k", "2", "--t", "1", "--force-color", "--no-color"]
        self.assertEqual(execute_from_command_line(argv, stdout=StringIO(), stderr=stderr), 1)
        self.assertIn("--no-color", stderr.getvalue())


class TestDjangoCommands(unittest.TestCase):
    """Every subcommand is a Django management command."""

    def test_subclass(self):
        for name in COMMANDS:
            self.assertIsInstance(load_command_class(name), BaseCommand)

    def test_usage_error_exits_one(self):
        stderr = StringIO()
        code = execute_from_command_line(["klconc", "bound", "--n", "2"], stdout=StringIO(), stderr=stderr)
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("CommandError", stderr.getvalue())
        self.assertIn("--t", stderr.getvalue())

    def test_bad_argument_type_exits_one(self):
        argv = ["klconc", "exact", "--n", "two", "--p", "0.5,0.5"]
        self.assertEqual(execute_from_command_line(argv, stdout=StringIO(), stderr=StringIO()), EXIT_VALIDATION)

    def test_subcommand_help(self):
        with mock.patch("sys.stdout", new_callable=StringIO) as stdout:
            code = execute_from_command_line(["klconc", "threshold", "--help"], stdout=StringIO(), stderr=StringIO())
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertIn("--delta", stdout.getvalue())
        self.assertNotIn("--pythonpath", stdout.getvalue())
