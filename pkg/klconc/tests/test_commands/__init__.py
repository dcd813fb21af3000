"""Tests for the klconc subcommands."""
from io import StringIO

from klconc.management import execute_from_command_line


def run_command(*args):
    """Run `klconc <args>` in-process and return (exit code, stdout, stderr)."""
    stdout, stderr = StringIO(), StringIO()
    code = execute_from_command_line(["klconc", *args, "--verbosity", "0"], stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()
