"""Command-line front end of isomeasure.

Exit codes: 0 success, 1 usage, 2 infeasible generation, 3 precondition
failure, 4 verification failure.
"""

import argparse
import json
import logging
import sys
import numpy as np

from pathlib import Path
from typing import Callable, Sequence

from src.isomeasure.utils.container import Container, build_container
from src.isomeasure.utils.errors import (
    InfeasibleError,
    IsomeasureError,
    PreconditionError,
)
from src.isomeasure.utils.generators import (
    cross_polytope_measure,
    regular_simplex_measure,
)
from src.isomeasure.utils.measure import (
    InequalityViolation,
    lift,
    moment_report,
    verify_lift,
)
from src.isomeasure.utils.polytope import (
    body_of,
    is_regular_simplex,
    mc_volume,
    polar_of,
    volume,
)
from src.isomeasure.utils.transport import ball_barthe_check
from src.isomeasure.utils.verifier import theorem1_bound, theorem2_bound

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_PRECONDITION = 3
EXIT_FAILED = 4

MIN_CHAIN_SAMPLES = 10_000


class UsageError(IsomeasureError):
    """Raised for argument combinations argparse cannot reject itself."""


def _emit(container: Container, data: dict | list, out: Path | None) -> None:
    container.output_handler().save(data, out)


def _load_measure(container: Container, path: Path):
    return container.input_handler(path=path).load_measure()


def command_gen(args: argparse.Namespace, container: Container) -> int:
    if args.kind == "simplex":
        measure = regular_simplex_measure(args.n)
    elif args.kind == "cross":
        measure = cross_polytope_measure(args.n)
    else:
        if args.m is None:
            raise UsageError("random measures need --m.")
        if args.m < args.n + 1:
            raise UsageError(
                f"--m must be at least n + 1 = {args.n + 1}, got {args.m}."
            )
        measure = container.random_measure(
            n=args.n, m=args.m, seed=args.seed
        )
    if args.perturb is not None:
        measure = container.perturbed_measure(
            measure, eps=args.perturb, seed=args.seed
        )
    _emit(container, measure.to_model().model_dump(), args.out)
    report = moment_report(measure)
    _emit(
        container,
        {
            "atoms": measure.size,
            "isotropy_residual": report.isotropy_residual,
            "first_moment_norm": float(np.linalg.norm(report.first_moment)),
            "total_mass": report.total_mass,
            "out": str(args.out),
        },
        None,
    )
    return EXIT_OK


def command_verify(args: argparse.Namespace, container: Container) -> int:
    measure = _load_measure(container, args.path)
    container.config.verify_which.from_value(args.which)
    result = container.verifier(measure)
    reports = result if isinstance(result, list) else [result]
    payload = [r.to_json() for r in reports]
    _emit(container, payload if len(payload) > 1 else payload[0], args.out)
    return (
        EXIT_OK if all(r.inequality_holds for r in reports) else EXIT_FAILED
    )


def command_chain(args: argparse.Namespace, container: Container) -> int:
    samples = args.samples or container.config.sampling.samples()
    if samples < MIN_CHAIN_SAMPLES:
        raise UsageError(
            f"--samples must be at least {MIN_CHAIN_SAMPLES}, got {samples}."
        )
    measure = _load_measure(container, args.path)
    container.config.chain_theorem.from_value(args.theorem)
    report = container.chain_runner(
        measure, samples=samples, seed=args.seed, probes=args.probes
    )
    _emit(container, report.to_json(), args.out)
    for check in report.checks:
        if not check.passed:
            logger.warning("Check %s failed: %s", check.name, check.details)
    return EXIT_OK if report.passed else EXIT_FAILED


def command_lift(args: argparse.Namespace, container: Container) -> int:
    measure = _load_measure(container, args.path)
    lifted = lift(measure, container.config.tolerances.solver())
    check = verify_lift(lifted, container.config.tolerances.lift())
    _emit(
        container,
        {
            "lifted": lifted.as_measure().to_model().model_dump(),
            "check": check.to_dict(),
        },
        args.out,
    )
    return EXIT_OK if check.passed else EXIT_FAILED


def command_volume(args: argparse.Namespace, container: Container) -> int:
    measure = _load_measure(container, args.path)
    body = body_of(measure)
    if args.polar:
        polytope, bound = polar_of(measure, body), theorem1_bound(measure.dim)
    else:
        polytope, bound = body, theorem2_bound(measure.dim)
    data = {
        "body": "polar" if args.polar else "hull",
        "n": measure.dim,
        "volume": volume(polytope),
        "bound": bound,
        "equality": is_regular_simplex(measure),
    }
    if args.samples:
        estimate, stderr = mc_volume(
            polytope,
            args.samples,
            args.seed,
            container.config.sampling.chunk_size(),
            container.config.sampling.threads(),
        )
        data.update(mc_volume=estimate, mc_stderr=stderr)
    _emit(container, data, args.out)
    return EXIT_OK


def _parse_values(raw: str, container: Container) -> np.ndarray:
    path = Path(raw)
    if path.suffix == ".json":
        return container.input_handler(path=path).load_values()
    try:
        return np.array([float(v) for v in raw.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"Cannot parse values {raw!r}.")


def command_ballbarthe(args: argparse.Namespace, container: Container) -> int:
    measure = _load_measure(container, args.path)
    if args.constant is not None:
        values = np.full(measure.size, args.constant)
    else:
        values = _parse_values(args.values, container)
    result = ball_barthe_check(
        measure,
        values,
        container.config.tolerances.solver(),
        container.config.tolerances.equality(),
    )
    _emit(container, result._asdict(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isomeasure",
        description="Volume inequalities of isotropic measures.",
    )
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a measure file.")
    gen.add_argument("kind", choices=["simplex", "cross", "random"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--perturb", type=float, default=None, metavar="EPS")
    gen.add_argument("--out", type=Path, required=True)
    gen.set_defaults(handler=command_gen)

    verify = commands.add_parser("verify", help="Check both inequalities.")
    verify.add_argument("path", type=Path)
    verify.add_argument(
        "--which", choices=["t1", "t2", "both"], default="both"
    )
    verify.add_argument("--out", type=Path, default=None)
    verify.set_defaults(handler=command_verify)

    chain = commands.add_parser("chain", help="Follow a proof chain.")
    chain.add_argument("path", type=Path)
    chain.add_argument("--theorem", choices=["t1", "t2"], required=True)
    chain.add_argument("--samples", type=int, default=None)
    chain.add_argument("--seed", type=int, default=0)
    chain.add_argument("--probes", type=int, default=1000)
    chain.add_argument("--out", type=Path, default=None)
    chain.set_defaults(handler=command_chain)

    lift_cmd = commands.add_parser("lift", help="Lift a measure to S^n.")
    lift_cmd.add_argument("path", type=Path)
    lift_cmd.add_argument("--out", type=Path, default=None)
    lift_cmd.set_defaults(handler=command_lift)

    vol = commands.add_parser("volume", help="Volume of the hull or polar.")
    vol.add_argument("path", type=Path)
    which = vol.add_mutually_exclusive_group(required=True)
    which.add_argument("--polar", action="store_true")
    which.add_argument("--body", action="store_true")
    vol.add_argument("--samples", type=int, default=None)
    vol.add_argument("--seed", type=int, default=0)
    vol.add_argument("--out", type=Path, default=None)
    vol.set_defaults(handler=command_volume)

    bb = commands.add_parser("ballbarthe", help="Determinant inequality.")
    bb.add_argument("path", type=Path)
    values = bb.add_mutually_exclusive_group(required=True)
    values.add_argument("--values", type=str)
    values.add_argument("--constant", type=float)
    bb.add_argument("--out", type=Path, default=None)
    bb.set_defaults(handler=command_ballbarthe)
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        return EXIT_OK if stop.code == 0 else EXIT_USAGE
    try:
        container = build_container(args.config)
    except (FileExistsError, TypeError) as error:
        sys.stderr.write(f"error: {error}\n")
        return EXIT_USAGE
    _configure_logging(args.log_level or container.config.log_level())
    handler: Callable[[argparse.Namespace, Container], int] = args.handler
    try:
        return handler(args, container)
    except InfeasibleError as error:
        logger.error("%s", error)
        return EXIT_INFEASIBLE
    except PreconditionError as error:
        logger.error("%s", error)
        sys.stderr.write(json.dumps(error.residuals, sort_keys=True) + "\n")
        return EXIT_PRECONDITION
    except InequalityViolation as error:
        logger.error("%s", error)
        return EXIT_FAILED
    except (IsomeasureError, FileExistsError, ValueError, TypeError) as error:
        logger.error("%s", error)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
