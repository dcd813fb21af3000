"""Django management-command base for the klconc subcommands, plus the process exit codes."""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

EXIT_SUCCESS = 0
EXIT_VALIDATION = 1
EXIT_CAP_EXCEEDED = 2
EXIT_VERIFY_FAILED = 3


def configure_settings():
    """klconc has no project settings module; give Django an empty configuration once per process."""
    if not settings.configured:
        settings.configure()


class KLConcCommand(BaseCommand):
    """BaseCommand without Django's project plumbing.

    run_from_argv() returns the exit code instead of calling sys.exit(), and usage errors raise CommandError
    (exit code 1) rather than argparse's exit code 2, which klconc reserves for an exceeded support cap.
    """

    requires_system_checks = []
    suppressed_base_arguments = {"--settings", "--pythonpath", "--skip-checks", "--version"}

    def run_from_argv(self, argv):
        """Parse argv ([prog, subcommand, *args]), execute the command and return the process exit code."""
        options = {}
        try:
            parser = self.create_parser(argv[0], argv[1])
            options = vars(parser.parse_args(argv[2:]))
            args = options.pop("args", ())
            options["argv"] = list(argv)
            self.execute(*args, **options)
        except CommandError as err:
            if options.get("traceback"):
                raise
            self.stderr.write(f"{err.__class__.__name__}: {err}")
            return err.returncode
        except SystemExit as err:
            # --help
            return err.code or EXIT_SUCCESS
        return EXIT_SUCCESS
