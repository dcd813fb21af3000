"""Definition of the `klconc verify` command."""
from django.core.management.base import CommandError
from pydantic import ValidationError

from klconc.command_utils import (
    add_common_arguments,
    build_run_config,
    emit,
    initialize_logger,
    int_list,
    probability_list,
    render,
)
from klconc.exceptions import KLConcError
from klconc.management.base import EXIT_VERIFY_FAILED, KLConcCommand
from klconc.models import GridSpec
from klconc.verify import PROPERTIES, run_all

VERIFY_CSV_HEADER = ("property", "passed", "cells_checked", "cells_skipped", "failures", "min_slack")

GRID_OPTIONS = (
    "n_values",
    "mc_n_values",
    "k_values",
    "alpha_values",
    "t_grid",
    "t_points",
    "mc_samples",
    "seeds",
    "cap",
    "threads",
)


class Command(KLConcCommand):
    """Implementation of the verify command."""

    help = "Check the catalogue of inequalities and identities over a parameter grid"

    def add_arguments(self, parser):
        """Add parser arguments to the verify command."""
        parser.add_argument(
            "--property",
            action="append",
            choices=tuple(PROPERTIES),
            help="Property to check (repeatable); all properties by default.",
        )
        parser.add_argument("--n-values", type=int_list, help="Exact-cell sample sizes, e.g. 1,2,3.")
        parser.add_argument("--mc-n-values", type=int_list, help="Monte Carlo sample sizes.")
        parser.add_argument("--k-values", type=int_list, help="Alphabet sizes.")
        parser.add_argument("--alpha-values", type=probability_list, help="Extra alpha-floor shapes.")
        parser.add_argument("--t-grid", type=probability_list, help="Explicit tail thresholds.")
        parser.add_argument("--t-points", type=int, help="Points of the default tail-threshold grid.")
        parser.add_argument("--mc-samples", type=int, help="Monte Carlo draws per cell.")
        parser.add_argument("--seed", dest="seeds", type=int, action="append", help="Seed (repeatable).")
        parser.add_argument("--cap", type=int, help="Largest support enumerated exactly.")
        add_common_arguments(parser)

    def handle(self, *args, **options):
        """Handle execution of the verify command."""
        config = build_run_config("verify", options)
        logger, _ = initialize_logger(options)
        overrides = {name: options[name] for name in GRID_OPTIONS if options.get(name) is not None}
        try:
            grid = GridSpec(**overrides)
        except ValidationError as err:
            raise CommandError(f"Invalid grid: {err}") from err

        try:
            reports = run_all(
                grid, config.constants_config(), options.get("property"), verbosity=options.get("verbosity", 0)
            )
        except KLConcError as err:
            raise CommandError(str(err)) from err

        passed = all(report.passed for report in reports)
        rows = [dict(report.to_dict(), failures=len(report.failures)) for report in reports]
        document = {"passed": passed, "reports": [report.to_dict() for report in reports]}
        emit(self, render(config.fmt, document, VERIFY_CSV_HEADER, rows), options)

        if not passed:
            failed = [report.property for report in reports if not report.passed]
            logger.warning("Verification failed", properties=failed)
            raise CommandError(f"verification failed for: {', '.join(failed)}", returncode=EXIT_VERIFY_FAILED)
        logger.info("Verification passed", properties=len(reports))
