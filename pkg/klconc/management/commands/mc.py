"""Definition of the `klconc mc` command."""
from django.core.management.base import CommandError

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
from klconc.montecarlo import mc_coverage, mc_log_mgf, mc_moment, mc_tail, sample_statistic

MC_CSV_HEADER = ("estimator", "n", "k", "parameter", "estimate", "std_error", "samples", "seed")


class Command(KLConcCommand):
    """Implementation of the mc command."""

    help = "Estimate a tail, moment, log-MGF or coverage of Z by seeded Monte Carlo"

    def add_arguments(self, parser):
        """Add parser arguments to the mc command."""
        add_instance_arguments(parser)
        parser.add_argument(
            "--estimator",
            choices=("tail", "moment", "log_mgf", "coverage"),
            default="tail",
            help="Quantity to estimate.",
        )
        parser.add_argument("--m", type=int, required=True, help="Number of Monte Carlo draws.")
        parser.add_argument("--seed", type=int, default=0, help="Seed; results depend on it and on nothing else.")
        parser.add_argument("--t", type=float, help="Threshold (tail) or MGF argument (log_mgf).")
        parser.add_argument("--moment", type=int, action="append", help="Moment order (repeatable).")
        parser.add_argument("--centered", action="store_true", help="Center moments at the exact mean 2g(n, p).")
        parser.add_argument("--delta", type=float, help="Confidence level of the coverage estimator.")
        parser.add_argument(
            "--unrestricted-t",
            action="store_true",
            help="Allow log_mgf arguments beyond 1/(2 c_main).",
        )
        add_common_arguments(parser)

    def handle(self, *args, **options):
        """Handle execution of the mc command."""
        config = build_run_config("mc", options)
        logger, _ = initialize_logger(options)
        p = config.distribution()
        cfg = config.constants_config()
        logger.info("Sampling", n=config.n, k=p.k, m=config.m, seed=config.seed, estimator=config.estimator)
        try:
            samples = sample_statistic(
                config.n, p, config.m, config.seed, threads=config.threads, verbosity=options.get("verbosity", 0)
            )
            common = {"m": config.m, "seed": config.seed, "samples": samples}
            if config.estimator == "tail":
                results = [(config.t, mc_tail(config.n, p, config.t, **common))]
            elif config.estimator == "moment":
                results = [
                    (order, mc_moment(config.n, p, order, config.centered, **common)) for order in config.moments
                ]
            elif config.estimator == "log_mgf":
                estimate = mc_log_mgf(
                    config.n, p, config.t, cfg=cfg, enforce_regime=not config.unrestricted_t, **common
                )
                results = [(config.t, estimate)]
            else:
                results = [(config.delta, mc_coverage(config.n, p, config.delta, cfg=cfg, **common))]
        except KLConcError as err:
            raise CommandError(str(err)) from err

        rows = [
            dict(estimate.to_dict(), estimator=config.estimator, n=config.n, k=p.k, parameter=parameter)
            for parameter, estimate in results
        ]
        document = {
            "estimator": config.estimator,
            "n": config.n,
            "p": list(p.probs),
            "centered": config.centered,
            "results": [
                dict(estimate.to_dict(), parameter=parameter) for parameter, estimate in results
            ],
        }
        emit(self, render(config.fmt, document, MC_CSV_HEADER, rows), options)
