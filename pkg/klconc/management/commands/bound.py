"""Definition of the `klconc bound` command."""
from django.core.management.base import CommandError

from klconc.bounds import best_tail
from klconc.command_utils import (
    add_common_arguments,
    add_instance_arguments,
    build_run_config,
    emit,
    initialize_logger,
    render,
)
from klconc.exceptions import KLConcError
from klconc.management.base import KLConcCommand
from klconc.models import BOUND_CSV_HEADER


class Command(KLConcCommand):
    """Implementation of the bound command."""

    help = "Evaluate every tail bound on P(Z >= t) and report the best applicable one"

    def add_arguments(self, parser):
        """Add parser arguments to the bound command."""
        add_instance_arguments(parser)
        parser.add_argument("--t", type=float, required=True, help="Threshold t of the tail P(Z >= t).")
        add_common_arguments(parser)

    def handle(self, *args, **options):
        """Handle execution of the bound command."""
        config = build_run_config("bound", options)
        logger, _ = initialize_logger(options)
        try:
            report = best_tail(
                config.n, config.k, config.resolved_alpha(), config.t, config.constants_config(), config.distribution()
            )
        except KLConcError as err:
            raise CommandError(str(err)) from err
        for note in report.notes:
            logger.info("Note", note=note)
        if config.fmt == "table":
            rows = [
                {"bound": item.name, "value": item.value, "clamped": item.clamped, "applicable": item.applicable}
                for item in report.entries
            ]
            rows.append({"bound": f"best ({report.best_name})", "clamped": report.best_value, "applicable": True})
            text = render("table", None, ("bound", "value", "clamped", "applicable"), rows)
        else:
            text = render(config.fmt, report.to_dict(), BOUND_CSV_HEADER, [report.csv_row()])
        emit(self, text, options)
