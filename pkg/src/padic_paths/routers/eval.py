"""Evaluators: norm, frac, digits, lambda, char, gauss."""

import argparse
from typing import Any, Callable, Dict

from ..config.schemas import EvalResult
from ..config.settings import RunConfig
from ..propagator.gauss import BallSpec, gauss_brute, gauss_closed, gauss_stabilized, min_mesh
from ..propagator.padic_core import character, digits, frac_part, lambda_fn, norm, valuation
from . import emit, rational, require_place

Handler = Callable[[argparse.Namespace, RunConfig], int]


def handle_norm(args: argparse.Namespace, config: RunConfig) -> int:
    place = require_place(config)
    result: Dict[str, Any] = {"norm": norm(args.x, place)}
    if not place.is_archimedean:
        result["valuation"] = valuation(args.x, place.p)
    emit(EvalResult(command="norm", inputs={"x": args.x, "place": place}, result=result), config)
    return 0


def handle_frac(args: argparse.Namespace, config: RunConfig) -> int:
    p = require_place(config).p
    emit(EvalResult(command="frac", inputs={"x": args.x, "place": p}, result={"frac": frac_part(args.x, p)}), config)
    return 0


def handle_digits(args: argparse.Namespace, config: RunConfig) -> int:
    p = require_place(config).p
    expansion = digits(args.x, p, args.count)
    result = {"valuation": expansion.valuation, "digits": list(expansion.digits)}
    emit(EvalResult(command="digits", inputs={"x": args.x, "place": p, "count": args.count}, result=result), config)
    return 0


def handle_lambda(args: argparse.Namespace, config: RunConfig) -> int:
    place = require_place(config)
    emit(EvalResult(command="lambda", inputs={"x": args.x, "place": place}, result=lambda_fn(args.x, place)), config)
    return 0


def handle_char(args: argparse.Namespace, config: RunConfig) -> int:
    place = require_place(config)
    emit(EvalResult(command="char", inputs={"x": args.x, "place": place}, result=character(args.x, place)), config)
    return 0


def handle_gauss(args: argparse.Namespace, config: RunConfig) -> int:
    """Closed form; --gamma adds one ball integral, --oracle the stabilized brute-force value."""
    place = require_place(config)
    closed = gauss_closed(args.alpha, args.beta, place)
    inputs: Dict[str, Any] = {"alpha": args.alpha, "beta": args.beta, "place": place}
    result: Dict[str, Any] = {"closed": closed}
    status = 0
    if args.gamma is not None:
        p = place.p
        delta = args.delta if args.delta is not None else min_mesh(args.alpha, args.beta, p, args.gamma)
        inputs.update(gamma=args.gamma, delta=delta)
        result["ball"] = gauss_brute(args.alpha, args.beta, BallSpec(p, args.gamma, delta), config.term_budget, config.workers)
    if args.oracle:
        brute = gauss_stabilized(args.alpha, args.beta, place.p, config.tolerance, config.term_budget, config.workers)
        gap = abs(complex(closed) - brute)
        result.update(brute=brute, delta=gap)
        inputs["tol"] = config.tolerance
        status = 0 if gap < config.tolerance else 1
    emit(EvalResult(command="gauss", inputs=inputs, result=result), config)
    return status


def register(subparsers: Any, common: Callable[[argparse.ArgumentParser], None]) -> None:
    """Add the evaluator subcommands."""
    simple: Dict[str, Handler] = {
        "norm": handle_norm,
        "frac": handle_frac,
        "lambda": handle_lambda,
        "char": handle_char,
    }
    for name, handler in simple.items():
        parser = subparsers.add_parser(name, help=f"evaluate {name} at a place")
        common(parser)
        parser.add_argument("--x", type=rational, required=True)
        parser.set_defaults(handler=handler)

    parser = subparsers.add_parser("digits", help="canonical p-adic digits")
    common(parser)
    parser.add_argument("--x", type=rational, required=True)
    parser.add_argument("--count", type=int, default=8)
    parser.set_defaults(handler=handle_digits)

    parser = subparsers.add_parser("gauss", help="Gauss integral, closed form and brute force")
    common(parser)
    parser.add_argument("--alpha", type=rational, required=True)
    parser.add_argument("--beta", type=rational, default=rational("0"))
    parser.add_argument("--gamma", type=int, default=None, help="integrate over the ball p^-gamma Z_p")
    parser.add_argument("--delta", type=int, default=None, help="mesh for --gamma, default the minimal one")
    parser.add_argument("--oracle", action="store_true", help="compare with stabilized brute force")
    parser.set_defaults(handler=handle_gauss)
