"""Logging setup and argument helpers shared by the klconc commands."""
import argparse
import datetime
import platform
import pprint
import socket
import sys
import textwrap
from io import StringIO
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import colorama
import structlog
from django.core.management.base import CommandError
from pydantic import ValidationError

from klconc import __version__
from klconc.management.base import EXIT_VALIDATION
from klconc.models import RunConfig
from klconc.utils import canonical_json, csv_rows

SHAPE_CHOICES = ("uniform", "geometric", "two-level", "dirichlet", "alpha-floor")
FORMAT_CHOICES = ("json", "csv", "table")


class LogRenderer:  # pylint: disable=too-few-public-methods
    """Render structured log events for a terminal.

    Example:
        10:02:41 warning  Inequality violated
          cell:
            {'k': 3, 'n': 7, 'shape': 'geometric(0.5)', 't': 12.5}
          lhs: 0.0421
          property: sanov_dominates
          rhs: 0.0399
    """

    def __call__(
        self,
        logger: structlog.types.WrappedLogger,
        name: str,
        event_dict: structlog.types.EventDict,
    ) -> str:
        """Render the given event_dict to a string."""
        sio = StringIO()

        timestamp = event_dict.pop("timestamp", None)
        if timestamp is not None:
            sio.write(f"{colorama.Style.DIM}{timestamp}{colorama.Style.RESET_ALL} ")

        level = event_dict.pop("level", None)
        if level is not None:
            if level in ("warning", "error", "critical"):
                sio.write(f"{colorama.Fore.RED}{level:<9}{colorama.Style.RESET_ALL}")
            else:
                sio.write(f"{level:<9}")

        event = event_dict.pop("event", None)
        sio.write(f"{colorama.Style.BRIGHT}{event}{colorama.Style.RESET_ALL}")

        for key in sorted(event_dict):
            value = event_dict[key]
            if isinstance(value, float):
                value = f"{value:.6g}"
            elif isinstance(value, (dict, list, tuple)):
                rendered = pprint.pformat(value, compact=True)
                if len(rendered.splitlines()) > 50:
                    rendered = "\n".join(rendered.splitlines()[:50]) + "\n..."
                value = "\n" + textwrap.indent(rendered, "    ")
            sio.write(
                f"\n  {colorama.Fore.CYAN}{key}{colorama.Style.RESET_ALL}: "
                f"{colorama.Fore.MAGENTA}{value}{colorama.Style.RESET_ALL}"
            )

        return sio.getvalue()


def enable_logging(verbosity=0, color=None):
    """Set up structlog to write human-readable events to stderr."""
    if color is None:
        # Let colorama decide whether or not to strip out color codes
        colorama.init()
    else:
        colorama.init(strip=(not color))

    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="%H:%M:%S"),
            LogRenderer(),
        ],
        context_class=dict,
        # Verbosity     Logging level
        # 0             30 (WARNING)
        # 1-2           20 (INFO)
        # 3+            10 (DEBUG)
        wrapper_class=structlog.make_filtering_bound_logger(10 * (3 - ((max(verbosity, 0) + 1) // 2))),
        # stdout carries the canonical output only.
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def initialize_logger(options):
    """Initialize logger instance."""
    color = None
    if options.get("force_color"):
        color = True
    if options.get("no_color"):
        color = False

    enable_logging(verbosity=options.get("verbosity", 0), color=color)
    return structlog.get_logger(), color


#
# Argument types
#


def probability_list(text: str) -> Tuple[float, ...]:
    """argparse type for a comma-separated list of reals."""
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from err


def int_list(text: str) -> Tuple[int, ...]:
    """argparse type for a comma-separated list of integers."""
    try:
        return tuple(int(item) for item in text.split(",") if item.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from err


def constant_override(text: str) -> Tuple[str, float]:
    """argparse type for NAME=VALUE constant overrides."""
    name, separator, value = text.partition("=")
    if not separator or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"constant {name.strip()} needs a numeric value, got {value!r}") from err


#
# Shared argument groups
#


def add_instance_arguments(parser, require_n=True):
    """--n, --k and the distribution (explicit --p or a named --p-shape)."""
    parser.add_argument("--n", type=int, required=require_n, help="Sample size n.")
    parser.add_argument("--k", type=int, help="Alphabet size k (implied by --p).")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--p", type=probability_list, help="Comma-separated probabilities, e.g. 0.5,0.5.")
    group.add_argument("--p-shape", choices=SHAPE_CHOICES, help="Named distribution shape on --k symbols.")
    parser.add_argument("--shape-param", type=float, help="Shape parameter (ratio, heavy factor or alpha).")
    parser.add_argument("--shape-seed", type=int, help="Seed of the dirichlet shape.")
    parser.add_argument("--normalize", action="store_true", help="Rescale --p to sum to one.")
    parser.add_argument("--alpha", type=float, help="Minimum probability (defaults to min p).")


def add_common_arguments(parser):
    """Constants overrides, worker threads and output options."""
    parser.add_argument(
        "--constant",
        type=constant_override,
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="Override one named constant; applied after the KLCONC_CONSTANTS file.",
    )
    parser.add_argument("--threads", type=int, default=1, help="Upper bound on worker threads.")
    parser.add_argument("--format", dest="fmt", choices=FORMAT_CHOICES, default="json", help="Output format.")
    parser.add_argument("--output", help="Write the output to this file instead of stdout.")
    parser.add_argument(
        "--annotate",
        action="store_true",
        help="With --output, also write <output>.meta.json holding version, time, host and argv.",
    )


def build_run_config(subcommand: str, options: Mapping[str, Any]) -> RunConfig:
    """Validate parsed options into a RunConfig, turning validation errors into exit code 1."""
    shape_param = options.get("shape_param")
    if options.get("p_shape") == "dirichlet" and options.get("shape_seed") is not None:
        shape_param = float(options["shape_seed"])
    fields = {
        "subcommand": subcommand,
        "n": options.get("n"),
        "k": options.get("k"),
        "p": options.get("p"),
        "p_shape": options.get("p_shape"),
        "shape_param": shape_param,
        "normalize": options.get("normalize", False),
        "alpha": options.get("alpha"),
        "t": options.get("t"),
        "delta": options.get("delta"),
        "method": options.get("method") or "best",
        "estimator": options.get("estimator") or "tail",
        "moments": options.get("moment") or (),
        "centered": options.get("centered", False),
        "m": options.get("m"),
        "seed": options.get("seed") or 0,
        "threads": options.get("threads") or 1,
        "unrestricted_t": options.get("unrestricted_t", False),
        "properties": options.get("property") or (),
        "cap": options.get("cap") or 10**7,
        "constants": dict(options.get("constant") or []),
        "fmt": options.get("fmt") or "json",
        "output": options.get("output"),
    }
    try:
        config = RunConfig(**fields)
        # Resolve eagerly so a bad distribution or constant fails before any computation.
        config.distribution()
        config.constants_config()
    except (ValidationError, ValueError, OSError) as err:
        raise CommandError(f"Invalid arguments: {err}", returncode=EXIT_VALIDATION) from err
    return config


#
# Output
#


def render_table(header: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    """Left-aligned plain-text table."""
    cells: List[List[str]] = [list(header)]
    for row in rows:
        cells.append([_table_cell(row.get(column)) for column in header])
    widths = [max(len(line[i]) for line in cells) for i in range(len(header))]
    lines = ["  ".join(value.ljust(width) for value, width in zip(line, widths)).rstrip() for line in cells]
    return "\n".join(lines) + "\n"


def _table_cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render(fmt: str, document: Any, header: Sequence[str], rows: Sequence[Mapping[str, Any]]) -> str:
    """Render a result as canonical JSON, CSV or a table."""
    if fmt == "json":
        return canonical_json(document)
    if fmt == "csv":
        return csv_rows(header, rows)
    return render_table(header, rows)


def annotation(argv: Sequence[str]) -> Dict[str, Any]:
    """Side metadata for --annotate; never part of the canonical output."""
    return {
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "host": socket.gethostname(),
        "python": platform.python_version(),
        "argv": list(argv),
    }


def emit(command, text: str, options: Mapping[str, Any]):
    """Write rendered output to --output or the command's stdout, plus the --annotate side file."""
    output = options.get("output")
    if not output:
        command.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    if options.get("annotate"):
        with open(f"{output}.meta.json", "w", encoding="utf-8") as handle:
            handle.write(canonical_json(annotation(options.get("argv") or sys.argv)))
