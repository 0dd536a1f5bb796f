"""
padic-paths command-line front end.

Evaluators, exact propagators and verification suites for quadratic actions
over the p-adic and real places. Results go to standard output as one JSON
object per line; logs and errors go to standard error.
"""

import argparse
import re
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import structlog

from .config.logging import configure_logging
from .config.settings import load_config
from .propagator.errors import PropagatorError
from .routers import add_common_options
from .routers import eval as eval_router
from .routers import kernel as kernel_router
from .routers import verify as verify_router

logger = structlog.get_logger(__name__)

# exit code for unusable arguments and configuration, matching argparse
USAGE_ERROR = 2

_NEGATIVE_RATIONAL = re.compile(r"^-\d+(/\d+)?$")


def _common(parser: argparse.ArgumentParser) -> None:
    add_common_options(parser)
    parser.add_argument("--config", type=Path, default=None, help="key=value defaults file")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging and tracebacks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-paths", description=__doc__.strip().splitlines()[0])
    subparsers = parser.add_subparsers(dest="command", required=True)
    eval_router.register(subparsers, _common)
    kernel_router.register(subparsers, _common)
    verify_router.register(subparsers, _common)
    return parser


def _attach_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite `--x -1/3` as `--x=-1/3`; argparse reads `-1/3` as an option."""
    out: List[str] = []
    for token in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_RATIONAL.match(token):
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = load_config(
            args.config,
            place=args.place,
            h=args.h,
            tolerance=args.tolerance,
            term_budget=args.term_budget,
            seed=args.seed,
            workers=args.workers,
            series_target=args.series_target,
            output=args.output,
            log_level="DEBUG" if args.verbose else None,
        )
    except (ValueError, FileNotFoundError) as exc:
        sys.stderr.write(f"ConfigError: {exc}\n")
        return USAGE_ERROR

    configure_logging(config.log_level, json=config.log_format == "json")
    try:
        return args.handler(args, config)
    except PropagatorError as exc:
        if args.verbose:
            logger.exception("command_failed", command=args.command)
        sys.stderr.write(f"{exc.name}: {exc}\n")
        return exc.exit_code
    except ValueError as exc:
        if args.verbose:
            logger.exception("command_failed", command=args.command)
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return USAGE_ERROR


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
