"""Definition of the `klconc exact` command."""
from django.core.management.base import CommandError

from klconc.command_utils import (
    add_common_arguments,
    add_instance_arguments,
    build_run_config,
    emit,
    initialize_logger,
    render,
)
from klconc.core_math import g_func
from klconc.exact_law import DEFAULT_CAP, enumerate_law, law_mean, law_moment, law_tail, law_variance, support_size
from klconc.exceptions import KLConcError, SupportCapExceeded
from klconc.management.base import EXIT_CAP_EXCEEDED, KLConcCommand


class Command(KLConcCommand):
    """Implementation of the exact command."""

    help = "Enumerate the exact law of Z and report its mean, variance, moments and tail"

    def add_arguments(self, parser):
        """Add parser arguments to the exact command."""
        add_instance_arguments(parser)
        parser.add_argument("--t", type=float, help="Report the tail P(Z >= t).")
        parser.add_argument("--moment", type=int, action="append", help="Moment order to report (repeatable).")
        parser.add_argument("--centered", action="store_true", help="Report centered instead of raw moments.")
        parser.add_argument(
            "--cap", type=int, default=DEFAULT_CAP, help="Refuse supports larger than this many outcomes."
        )
        parser.add_argument("--atoms", action="store_true", help="Include every atom of the law in JSON output.")
        add_common_arguments(parser)

    def handle(self, *args, **options):
        """Handle execution of the exact command."""
        config = build_run_config("exact", options)
        logger, _ = initialize_logger(options)
        p = config.distribution()
        logger.info("Enumerating exact law", n=config.n, k=p.k, cap=config.cap)
        try:
            law = enumerate_law(config.n, p, config.cap, threads=config.threads, verbosity=options.get("verbosity", 0))
        except SupportCapExceeded as err:
            raise CommandError(str(err), returncode=EXIT_CAP_EXCEEDED) from err
        except KLConcError as err:
            raise CommandError(str(err)) from err

        summary = {
            "n": config.n,
            "k": p.k,
            "support_size": support_size(config.n, sum(1 for mass in p.probs if mass > 0)),
            "atoms": len(law),
            "mean": law_mean(law),
            "two_g": 2.0 * g_func(config.n, p),
            "variance": law_variance(law),
            "t": config.t,
            "tail": None if config.t is None else law_tail(law, config.t),
        }
        moments = {order: law_moment(law, order, centered=config.centered) for order in config.moments}
        document = dict(summary, p=list(p.probs), centered=config.centered)
        document["moments"] = {str(order): value for order, value in moments.items()}
        if options.get("atoms"):
            document["law"] = law.to_dict()["atoms"]

        row = dict(summary, **{f"moment_{order}": value for order, value in moments.items()})
        header = list(summary) + [f"moment_{order}" for order in moments]
        emit(self, render(config.fmt, document, header, [row]), options)
        logger.info("Exact law complete", atoms=len(law), mean=summary["mean"])
