"""
Command-line surface of the legendrian package.

    python cli.py torus-knot M N
    python cli.py evolve PROFILE N T_END [--snapshots K] [--field Z|V] [--polylines]
    python cli.py stationary E1 E3 [--e2 E2] [--case CASE] | stationary --published NAME
    python cli.py scan Q_NUM Q_DEN
    python cli.py hierarchy N_MAX

    Common flags: [--samples N] [--out DIR] [--format json|csv] [--tol TOL] [--max-denominator D]

Exit codes: 0 success, 2 rejected input, 3 numerical failure. Diagnostics go
to stderr; stdout carries a single summary line.
"""

import argparse
import sys
from typing import List, Optional

import anyio

from legendrian.config import (
    DEFAULT_SAMPLES,
    FLOW_CFL,
    RATIONAL_MAX_DENOMINATOR,
)
from legendrian.logging_utils import get_logger
from legendrian.stationary import CASES, SYMMETRIC
from tools.evolve import evolve_impl
from tools.export import FORMATS
from tools.hierarchy import hierarchy_impl
from tools.knot import torus_knot_impl
from tools.scan import scan_impl
from tools.stationary import stationary_impl

logger = get_logger("CLI")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="sample count N")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="json", help="table format")
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance override: rational detection (stationary), Maslov integrality "
                             "(torus-knot), corrector residual (scan); unused by evolve and hierarchy")
    common.add_argument("--max-denominator", type=int, default=RATIONAL_MAX_DENOMINATOR,
                        help="largest denominator accepted by rational detection")

    parser = argparse.ArgumentParser(prog="legendrian", description="Legendrian curves in S³ under mKdV flows")
    commands = parser.add_subparsers(dest="command", required=True)

    knot = commands.add_parser("torus-knot", parents=[common], help="constant-curvature torus knot")
    knot.add_argument("m", type=int)
    knot.add_argument("n", type=int)

    evolve = commands.add_parser("evolve", parents=[common], help="evolve a curvature profile")
    evolve.add_argument("profile", help="CSV file with header s,k")
    evolve.add_argument("n", type=int, help="flow level")
    evolve.add_argument("t_end", type=float)
    evolve.add_argument("--snapshots", type=int, default=0)
    evolve.add_argument("--field", dest="kind", choices=("Z", "V"), default="Z")
    evolve.add_argument("--cfl", type=float, default=FLOW_CFL)
    evolve.add_argument("--polylines", action="store_true", help="write a curve per snapshot")

    stationary = commands.add_parser("stationary", parents=[common], help="stationary curve of a modulus")
    stationary.add_argument("e1", type=float, nargs="?")
    stationary.add_argument("e3", type=float, nargs="?")
    stationary.add_argument("--e2", type=float, default=None)
    stationary.add_argument("--case", choices=CASES, default=SYMMETRIC)
    stationary.add_argument("--published", default=None, help="name in data/published_moduli.json")

    scan = commands.add_parser("scan", parents=[common], help="trace a modular curve")
    scan.add_argument("q_num", type=int)
    scan.add_argument("q_den", type=int)

    hierarchy = commands.add_parser("hierarchy", parents=[common], help="print hierarchy levels")
    hierarchy.add_argument("n_max", type=int)
    return parser


async def dispatch(args: argparse.Namespace) -> dict:
    overrides = {} if args.tol is None else {"tol": args.tol}
    if args.command == "torus-knot":
        return await torus_knot_impl(args.m, args.n, samples=args.samples, out=args.out, fmt=args.fmt,
                                     **overrides)
    if args.command == "evolve":
        return await evolve_impl(args.profile, args.n, args.t_end, snapshots=args.snapshots,
                                 kind=args.kind, polylines=args.polylines, cfl=args.cfl,
                                 out=args.out, fmt=args.fmt)
    if args.command == "stationary":
        return await stationary_impl(args.e1, args.e3, e2=args.e2, case=args.case,
                                     published=args.published, samples=args.samples,
                                     max_denominator=args.max_denominator,
                                     out=args.out, fmt=args.fmt, **overrides)
    if args.command == "scan":
        return await scan_impl(args.q_num, args.q_den, out=args.out, fmt=args.fmt, **overrides)
    return await hierarchy_impl(args.n_max, out=args.out, fmt=args.fmt)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    result = anyio.run(dispatch, args, backend="asyncio")
    if "error" in result:
        print(f"[CLI] {result['error']}: {result['details']}", file=sys.stderr)
        return int(result["exit_code"])
    print(result["summary"])
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
