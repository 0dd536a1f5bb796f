"""The `verify` subcommand: stream one report per check."""

import argparse
from typing import Any, Callable

from ..config.settings import RunConfig
from ..services.suites import SUITES, SuiteService
from . import emit


def handle_verify(args: argparse.Namespace, config: RunConfig) -> int:
    """Exit 0 iff every check of the suite passes."""
    failed = 0
    for report in SuiteService(config).run(args.suite):
        emit(report, config)
        if not report.passed:
            failed += 1
    return 1 if failed else 0


def register(subparsers: Any, common: Callable[[argparse.ArgumentParser], None]) -> None:
    parser = subparsers.add_parser("verify", help="run a verification suite")
    common(parser)
    parser.add_argument("--suite", choices=("all",) + SUITES, required=True)
    parser.set_defaults(handler=handle_verify)
