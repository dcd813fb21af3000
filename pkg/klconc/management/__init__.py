"""Command-line entry point: `klconc <subcommand> [options]`."""
import importlib
import sys

from klconc import __version__
from klconc.management.base import configure_settings

COMMANDS = ("exact", "bound", "mc", "verify", "threshold")


def load_command_class(name, stdout=None, stderr=None):
    """Instantiate the Command class of klconc.management.commands.<name>."""
    module = importlib.import_module(f"klconc.management.commands.{name}")
    return module.Command(stdout=stdout, stderr=stderr)


def main_help_text():
    """Usage text listing the available subcommands."""
    lines = ["usage: klconc <subcommand> [options]", "", "Available subcommands:"]
    for name in COMMANDS:
        lines.append(f"    {name:<10} {load_command_class(name).help}")
    lines.append("")
    lines.append("Type 'klconc <subcommand> --help' for help on a specific subcommand.")
    return "\n".join(lines) + "\n"


def execute_from_command_line(argv=None, stdout=None, stderr=None):
    """Dispatch argv to the named subcommand and return its exit code."""
    argv = list(sys.argv if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    configure_settings()
    subcommand = argv[1] if len(argv) > 1 else "help"
    if subcommand in ("help", "-h", "--help"):
        stdout.write(main_help_text())
        return 0
    if subcommand in ("version", "--version"):
        stdout.write(f"{__version__}\n")
        return 0
    if subcommand not in COMMANDS:
        stderr.write(f"Unknown subcommand: {subcommand!r}\n{main_help_text()}")
        return 1
    return load_command_class(subcommand, stdout=stdout, stderr=stderr).run_from_argv(argv)


def main():
    """Console-script entry point."""
    sys.exit(execute_from_command_line())
