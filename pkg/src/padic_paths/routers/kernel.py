"""Kernel evaluation, time slicing and brute-force evolution of catalog systems."""

import argparse
from typing import Any, Callable, Dict

from ..config.schemas import EvalResult
from ..config.settings import RunConfig
from ..propagator.actions import CATALOG, QuadraticAction, build_action
from ..propagator.kernel import BallFunction, KernelSpec, evolve, kernel_at, time_sliced
from . import emit, rational, require_place


def _params(args: argparse.Namespace) -> Dict[str, Any]:
    params = {"m": args.m}
    if args.system == "field":
        params["g"] = args.g
    if args.system == "oscillator":
        if args.omega is None:
            raise ValueError("the oscillator needs --omega")
        params["omega"] = args.omega
    return params


def _action(args: argparse.Namespace, config: RunConfig) -> QuadraticAction:
    place = require_place(config)
    return build_action(args.system, _params(args), args.t0, args.t1, place.prime, config.series_target)


def _coefficients(action: QuadraticAction) -> Dict[str, Any]:
    return dict(zip("abcdef", action.coefficients()), error_valuation=action.error_valuation)


def _inputs(args: argparse.Namespace, config: RunConfig) -> Dict[str, Any]:
    return {
        "system": args.system,
        "params": _params(args),
        "t0": args.t0,
        "t1": args.t1,
        "x0": args.x0,
        "x1": args.x1,
        "place": config.place,
        "h": config.h,
    }


def handle_kernel(args: argparse.Namespace, config: RunConfig) -> int:
    action = _action(args, config)
    spec = KernelSpec(action, require_place(config), config.h)
    value = kernel_at(spec, args.x1, args.x0)
    emit(EvalResult(command="kernel", inputs=_inputs(args, config), result={"kernel": value, "action": _coefficients(action)}), config)
    return 0


def handle_slice(args: argparse.Namespace, config: RunConfig) -> int:
    """Sliced kernel next to the direct one; exit 1 when they differ."""
    place = require_place(config)
    action = _action(args, config)
    direct = kernel_at(KernelSpec(action, place, config.h), args.x1, args.x0)
    sliced = time_sliced(
        args.system, _params(args), args.n, args.t0, args.t1, place, config.h, args.x1, args.x0, config.series_target
    )
    inputs = {**_inputs(args, config), "n": args.n}
    emit(EvalResult(command="slice", inputs=inputs, result={"sliced": sliced, "direct": direct, "equal": sliced == direct}), config)
    return 0 if sliced == direct else 1


def handle_evolve(args: argparse.Namespace, config: RunConfig) -> int:
    place = require_place(config)
    spec = KernelSpec(_action(args, config), place, config.h)
    psi = BallFunction.indicator(place.p, args.center, args.gamma)
    values = evolve(spec, psi, args.samples, config.term_budget, config.workers)
    inputs = {**_inputs(args, config), "center": args.center, "gamma": args.gamma, "samples": args.samples}
    emit(EvalResult(command="evolve", inputs=inputs, result={"values": values, "abs": [abs(u) for u in values]}), config)
    return 0


def _system_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--system", choices=CATALOG, required=True)
    parser.add_argument("--m", type=rational, default=rational("1"))
    parser.add_argument("--g", type=rational, default=rational("0"))
    parser.add_argument("--omega", type=rational, default=None)
    parser.add_argument("--t0", type=rational, default=rational("0"))
    parser.add_argument("--t1", type=rational, default=rational("1"))
    parser.add_argument("--x0", type=rational, default=rational("0"), help="position at t0")
    parser.add_argument("--x1", type=rational, default=rational("0"), help="position at t1")


def register(subparsers: Any, common: Callable[[argparse.ArgumentParser], None]) -> None:
    """Add the kernel, slice and evolve subcommands."""
    parser = subparsers.add_parser("kernel", help="exact kernel of a catalog system")
    common(parser)
    _system_options(parser)
    parser.set_defaults(handler=handle_kernel)

    parser = subparsers.add_parser("slice", help="kernel from n composed time slices")
    common(parser)
    _system_options(parser)
    parser.add_argument("--n", type=int, default=2)
    parser.set_defaults(handler=handle_slice)

    parser = subparsers.add_parser("evolve", help="evolve a ball indicator by brute force")
    common(parser)
    _system_options(parser)
    parser.add_argument("--center", type=rational, default=rational("0"))
    parser.add_argument("--gamma", type=int, default=0, help="psi is the indicator of center + p^gamma Z_p")
    parser.add_argument("--samples", type=rational, nargs="+", required=True)
    parser.set_defaults(handler=handle_evolve)
