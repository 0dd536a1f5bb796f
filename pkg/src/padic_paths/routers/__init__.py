"""Subcommand handlers; each module registers its parsers on the main CLI."""

import argparse
import sys
from fractions import Fraction

from pydantic import BaseModel

from ..config.schemas import dumps, render_table_row
from ..config.settings import RunConfig
from ..propagator.padic_core import Place, parse_rational


def rational(text: str) -> Fraction:
    """argparse type for `num/den` or integer literals."""
    return parse_rational(text)


def require_place(config: RunConfig) -> Place:
    """The single place a command evaluates at."""
    if config.place is None:
        raise ValueError("this command needs --place (a prime or inf)")
    return Place.parse(config.place)


def emit(model: BaseModel, config: RunConfig) -> None:
    """Write one result line to standard output in the configured format."""
    line = render_table_row(model) if config.output == "table" else dumps(model).decode()
    sys.stdout.write(line)
    sys.stdout.flush()


def add_common_options(parser: argparse.ArgumentParser) -> None:
    """Options every subcommand accepts; None leaves the configured value."""
    parser.add_argument("--place", "--p", dest="place", default=None, help="prime p or inf")
    parser.add_argument("--h", type=rational, default=None, help="Planck constant (num/den)")
    parser.add_argument("--tolerance", type=float, default=None)
    parser.add_argument("--budget", dest="term_budget", type=int, default=None, help="brute-force term budget")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--series-target", dest="series_target", type=int, default=None)
    parser.add_argument("--output", choices=["json", "table"], default=None)
