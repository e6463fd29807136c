"""
Command-line entry point for the MAVE-BO benchmark suite.

    mavebo-bench run --func branin --dim 20 --algo smave --seeds 0-19 --out results.csv
    mavebo-bench describe --func hartmann3 --dim 50
    mavebo-bench selftest
"""

import argparse
import logging
import re
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.bench.experiment import ExperimentConfig, run_experiment
from src.bench.functions import DOMAIN_KINDS, LINKS, make_embedded_function
from src.bench.selftest import run_selftest
from src.config import settings
from src.config.logging_config import setup_logging
from src.errors import MaveBoError
from src.optimizer.factory import ALGORITHMS

logger = logging.getLogger(__name__)

FLAG_FOR_FIELD = {
    "function": "--func",
    "dim": "--dim",
    "effective_dim": "--effective-dim",
    "algorithm": "--algo",
    "seeds": "--seeds",
    "budget": "--budget",
    "n0": "--n0",
    "kernel": "--kernel",
    "smoothness": "--smoothness",
    "edr_dim": "--edr-dim",
    "domain": "--domain",
    "output_path": "--out",
    "output_format": "--format",
}

_RANGE = re.compile(r"^\s*(-?\d+)\s*-\s*(-?\d+)\s*$")


class UsageError(Exception):
    """A flag value could not be used; carries the flag name."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def parse_seeds(text: str) -> List[int]:
    """Parse "7", "1,2,3" or an inclusive range "0-19"."""
    match = _RANGE.match(text)
    if match:
        start, stop = int(match.group(1)), int(match.group(2))
        if stop < start:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(start, stop + 1))
    try:
        seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"invalid seed list {text!r}") from exc
    if not seeds:
        raise ValueError("no seeds given")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mavebo-bench", description="MAVE-BO benchmark runner"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run an algorithm on a benchmark over several seeds")
    run.add_argument("--func", required=True, help=f"Benchmark function ({', '.join(LINKS)})")
    run.add_argument("--dim", type=int, default=settings.BENCHMARK_DIMS[0], help="Ambient dimension D")
    run.add_argument("--effective-dim", type=int, default=None, help="Effective dimension (quadratic-bowl only)")
    run.add_argument("--algo", default="smave", help=f"Algorithm ({', '.join(ALGORITHMS)})")
    run.add_argument("--budget", type=int, default=settings.DEFAULT_BUDGET, help="Total evaluations N")
    run.add_argument("--n0", type=int, default=None, help="Initial uniform evaluations N0")
    run.add_argument("--seeds", default=f"0-{settings.DEFAULT_SEED_COUNT - 1}", help='Seeds: "7", "1,2,3" or "0-19"')
    run.add_argument("--out", default=None, help="Output file (default: results directory)")
    run.add_argument("--format", default="csv", help="Output format (csv or json)")
    run.add_argument("--kernel", default="matern", help="GP kernel (se or matern)")
    run.add_argument("--smoothness", type=float, default=2.5, help="Matern smoothness (0.5, 1.5, 2.5)")
    run.add_argument("--edr-dim", type=int, default=None, help="Dimension of the estimated EDR space")
    run.add_argument("--domain", default="ball", help=f"Input domain ({', '.join(DOMAIN_KINDS)})")
    run.add_argument("--log-level", default=None, help="Logging level")

    describe = subparsers.add_parser("describe", help="Print D, d_e and f_max of a benchmark")
    describe.add_argument("--func", required=True, help=f"Benchmark function ({', '.join(LINKS)})")
    describe.add_argument("--dim", type=int, default=settings.BENCHMARK_DIMS[0], help="Ambient dimension D")
    describe.add_argument("--domain", default="ball", help=f"Input domain ({', '.join(DOMAIN_KINDS)})")
    describe.add_argument("--effective-dim", type=int, default=None, help="Effective dimension (quadratic-bowl only)")
    describe.add_argument("--log-level", default=None, help="Logging level")

    selftest = subparsers.add_parser("selftest", help="Run the quick invariant suite")
    selftest.add_argument("--log-level", default=None, help="Logging level")
    return parser


def _flag_for_error(error: dict) -> str:
    loc = [part for part in error.get("loc", ()) if isinstance(part, str)]
    if loc and loc[0] in FLAG_FOR_FIELD:
        return FLAG_FOR_FIELD[loc[0]]
    message = error.get("msg", "")
    # The field named first in the message is the one at fault
    found = []
    for field_name, flag in FLAG_FOR_FIELD.items():
        match = re.search(rf"\b{field_name}\b", message)
        if match:
            found.append((match.start(), flag))
    return min(found)[1] if found else "arguments"


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    try:
        seeds = parse_seeds(args.seeds)
    except ValueError as exc:
        raise UsageError("--seeds", str(exc)) from exc

    output_format = args.format.lower()
    out = args.out
    if out is None:
        out = Path(settings.RESULTS_DIR) / f"{args.func}-D{args.dim}-{args.algo}.{output_format}"

    try:
        return ExperimentConfig(
            function=args.func,
            dim=args.dim,
            effective_dim=args.effective_dim,
            algorithm=args.algo.lower(),
            seeds=seeds,
            budget=args.budget,
            n0=args.n0,
            kernel=args.kernel.lower(),
            smoothness=args.smoothness,
            edr_dim=args.edr_dim,
            domain=args.domain.lower(),
            output_path=out,
            output_format=output_format,
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        raise UsageError(_flag_for_error(error), error.get("msg", str(exc))) from exc


def _run(args: argparse.Namespace) -> int:
    config = _experiment_config(args)
    summary = run_experiment(config)
    print(
        f"{config.algorithm} on {config.function} (D={config.dim}), {len(config.seeds)} seeds: "
        f"median simple regret {summary.median:.6g} (IQR {summary.q1:.6g} to {summary.q3:.6g})"
    )
    print(f"Results written to {config.output_path}")
    return 0


def _describe(args: argparse.Namespace) -> int:
    if args.func not in LINKS:
        raise UsageError("--func", f"unknown function {args.func!r}; expected one of {', '.join(LINKS)}")
    if args.domain.lower() not in DOMAIN_KINDS:
        raise UsageError("--domain", f"expected one of {', '.join(DOMAIN_KINDS)}, got {args.domain!r}")
    try:
        bench = make_embedded_function(args.func, args.dim, 0, args.domain.lower(), args.effective_dim)
    except MaveBoError as exc:
        raise UsageError("--dim", str(exc)) from exc
    print(f"function: {bench.name}")
    print(f"D: {bench.dim}")
    print(f"d_e: {bench.effective_dim}")
    print(f"f_max: {bench.f_max:.6f}")
    return 0


def _selftest(args: argparse.Namespace) -> int:
    results = run_selftest()
    failed = [result for result in results if not result.passed]
    print(f"selftest: {len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


COMMANDS = {"run": _run, "describe": _describe, "selftest": _selftest}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run a subcommand.

    Returns:
        0 on success, 1 if a run or the selftest fails, 2 for usage errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2

    setup_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mavebo-bench: error: {exc}", file=sys.stderr)
        return 2
    except MaveBoError as exc:
        logger.error(f"{args.command} failed: {exc}")
        return 1


def main() -> int:
    """Console-script entry point."""
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
