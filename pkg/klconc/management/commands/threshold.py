"""Definition of the `klconc threshold` command."""
from django.core.management.base import CommandError

from klconc.bounds import METHODS, threshold_for_test
from klconc.command_utils import (
    add_common_arguments,
    add_instance_arguments,
    build_run_config,
    emit,
    initialize_logger,
    render,
)
from klconc.exceptions import BoundNotApplicable, KLConcError
from klconc.management.base import KLConcCommand

THRESHOLD_CSV_HEADER = ("n", "k", "alpha", "delta", "method", "threshold", "sanov", "agrawal", "main")


class Command(KLConcCommand):
    """Implementation of the threshold command."""

    help = "Solve for the goodness-of-fit rejection threshold: the smallest t with bound(t) <= delta"

    def add_arguments(self, parser):
        """Add parser arguments to the threshold command."""
        add_instance_arguments(parser)
        parser.add_argument("--delta", type=float, required=True, help="Test level delta in (0, 1].")
        parser.add_argument(
            "--method", choices=tuple(METHODS) + ("best",), default="best", help="Bound the threshold is solved for."
        )
        add_common_arguments(parser)

    def handle(self, *args, **options):
        """Handle execution of the threshold command."""
        config = build_run_config("threshold", options)
        logger, _ = initialize_logger(options)
        alpha, p, cfg = config.resolved_alpha(), config.distribution(), config.constants_config()

        thresholds = {}
        for method in METHODS:
            try:
                thresholds[method] = threshold_for_test(config.n, config.k, alpha, config.delta, method, cfg, p)
            except BoundNotApplicable as err:
                logger.info("Method not applicable", method=method, reason=err.reason)
                thresholds[method] = None
            except KLConcError as err:
                raise CommandError(str(err)) from err
        applicable = {name: value for name, value in thresholds.items() if value is not None}
        if config.method == "best":
            method = min(applicable, key=applicable.get)
        elif thresholds[config.method] is None:
            raise CommandError(f"method {config.method} is not applicable to this instance")
        else:
            method = config.method

        row = {
            "n": config.n,
            "k": config.k,
            "alpha": alpha,
            "delta": config.delta,
            "method": method,
            "threshold": thresholds[method],
        }
        row.update(thresholds)
        document = dict(row, thresholds=thresholds)
        for name in METHODS:
            document.pop(name)
        emit(self, render(config.fmt, document, THRESHOLD_CSV_HEADER, [row]), options)
