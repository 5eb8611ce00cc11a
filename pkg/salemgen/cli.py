"""Command line entry point: ``salemgen <command> --config <path> [flags]``."""

import argparse
import csv
import logging
import sys

from typing import List, Optional, Sequence

import numpy as np

import salemgen

from salemgen._constants import (
    Continuity,
    EvalMethod,
    ExitCode,
    Monotonicity,
    QuadratureCheck,
    QuadratureDefaultValues,
    SampleDefaultValues,
)
from salemgen.config import RunConfig
from salemgen.exceptions import (
    ConfigError,
    DistributionError,
    PointParseError,
    SalemgenError,
    UnclassifiedError,
)
from salemgen.gensalem import (
    classify_continuity,
    classify_discontinuity_set,
    classify_monotonicity,
    eval_G_many,
    evaluate,
    integral,
    integral_quadrature,
)
from salemgen.numrep import DigitString, decode, encode, parse_digit_literal
from salemgen.rvdist import ks_compare, sample_eta
from salemgen.verify import all_passed, run_checks

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.usage, f"{self.prog}: error: {message}\n")


def _real(x: float) -> str:
    if x == 0.0:
        x = 0.0
    return f"{x:.12g}"


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def parse_point(text: str, config: RunConfig) -> DigitString:
    """A digit literal, or a real in [0, 1] encoded at depth 64 under ``P``.

    :raises PointParseError: if ``text`` is neither
    """
    text = text.strip()
    if text.startswith("digits:"):
        return parse_digit_literal(text, config.q)
    try:
        x = float(text)
    except ValueError:
        raise PointParseError(f"Point {text!r} is neither a real nor a digit literal", text)
    if not 0.0 <= x <= 1.0:
        raise PointParseError(f"Point {x} is outside [0, 1]", text)
    return encode(x, config.spec.schedule)


def cmd_eval(args, config: RunConfig) -> int:
    d = parse_point(args.point, config)
    tol = args.tol if args.tol is not None else config.tol
    result = evaluate(d, config.spec, args.method, tol)
    print(f"value={_real(result.value)}")
    print(f"bound={_real(result.bound)}")
    return ExitCode.ok


def grid_points(config: RunConfig, samples: int) -> List[DigitString]:
    """Left endpoints of ``samples`` equispaced rank-``m`` cylinders, ``q**m >= samples``."""
    q = config.q
    rank = 1
    while q**rank < samples:
        rank += 1
    points = []
    for i in range(samples):
        index = i * q**rank // samples
        base = tuple((index // q ** (rank - k)) % q for k in range(1, rank + 1))
        points.append(DigitString(q, base))
    return points


def cmd_plot(args, config: RunConfig) -> int:
    points = grid_points(config, args.samples)
    results = eval_G_many(points, config.spec, config.tol, config.resolve_threads(args.threads))
    with open(args.out, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["s", "G", "bound"])
        for d, result in zip(points, results):
            s = decode(d, config.spec.schedule).value
            writer.writerow([_real(s), _real(result.value), _real(result.bound)])
    logger.info(f"Wrote {len(points)} rows to {args.out}")
    return ExitCode.ok


def cmd_integral(args, config: RunConfig) -> int:
    closed = integral(config.spec)
    print(f"integral={_real(closed)}")
    if args.check == QuadratureCheck.none:
        return ExitCode.ok
    numeric = integral_quadrature(
        config.spec,
        threads=config.resolve_threads(args.threads),
        progress=args.progress,
    )
    delta = abs(closed - numeric)
    print(f"quadrature={_real(numeric)}")
    print(f"delta={_real(delta)}")
    if delta > args.tol:
        logger.error(f"Quadrature differs from the closed form by {delta:.3e} > {args.tol:.3e}")
        return ExitCode.check_failed
    return ExitCode.ok


def cmd_classify(args, config: RunConfig) -> int:
    spec = config.spec
    d = parse_point(args.point, config)
    verdict = classify_continuity(d, spec, config.tol)
    if verdict.kind == Continuity.continuous:
        print("continuous")
    else:
        print(f"jump left={_real(verdict.left)} right={_real(verdict.right)}")
    print(f"G_D {classify_discontinuity_set(spec)}")
    try:
        monotonicity = classify_monotonicity(spec)
    except UnclassifiedError as e:
        logger.warning(str(e))
        print("monotonicity unclassified")
    else:
        print(monotonicity.kind)
        if monotonicity.non_decreasing and monotonicity.kind != Monotonicity.strictly_increasing:
            print("non-decreasing")
    return ExitCode.ok


def cmd_sample(args, config: RunConfig) -> int:
    seed = args.seed if args.seed is not None else config.seed
    samples = sample_eta(config.spec, args.n, seed, config.resolve_threads(args.threads))
    print(f"n={args.n}")
    print(f"seed={seed}")
    print(f"mean={_real(float(np.mean(samples)))}")
    if args.ks:
        report = ks_compare(
            samples,
            config.spec,
            grid_size=args.grid_size,
            threshold=args.threshold,
            seed=seed,
            threads=config.resolve_threads(args.threads),
        )
        print(f"ks_statistic={_real(report.ks_statistic)}")
        print(f"p_value={_real(report.p_value)}")
        print(f"pass={'true' if report.passed else 'false'}")
    return ExitCode.ok


def cmd_verify(args, config: RunConfig) -> int:
    results = run_checks(config, progress=args.progress)
    for result in results:
        print(f"{result.name}: {'PASS' if result.passed else 'FAIL'} {result.detail}")
    return ExitCode.ok if all_passed(results) else ExitCode.verify_failed


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="salemgen", description="Generalized Salem functions")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config; defaults to $SALEMGEN_CONFIG")
    common.add_argument("--threads", type=_positive_int, default=None)
    common.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )

    eval_parser = commands.add_parser("eval", parents=[common], help="evaluate G at a point")
    eval_parser.add_argument("point", help="real in [0, 1] or digit literal")
    eval_parser.add_argument(
        "--method", choices=[EvalMethod.series, EvalMethod.feq], default=EvalMethod.series
    )
    eval_parser.add_argument("--tol", type=float, default=None)
    eval_parser.set_defaults(handler=cmd_eval)

    plot_parser = commands.add_parser("plot", parents=[common], help="write G on a grid as CSV")
    plot_parser.add_argument("--samples", type=int, required=True)
    plot_parser.add_argument("--out", required=True)
    plot_parser.set_defaults(handler=cmd_plot)

    integral_parser = commands.add_parser("integral", parents=[common], help="integral of G")
    integral_parser.add_argument(
        "--check",
        choices=[QuadratureCheck.none, QuadratureCheck.quadrature],
        default=QuadratureCheck.none,
    )
    integral_parser.add_argument("--tol", type=float, default=QuadratureDefaultValues.check_tol)
    integral_parser.add_argument("--progress", action="store_true")
    integral_parser.set_defaults(handler=cmd_integral)

    classify_parser = commands.add_parser("classify", parents=[common], help="classify G")
    classify_parser.add_argument("point", help="real in [0, 1] or digit literal")
    classify_parser.set_defaults(handler=cmd_classify)

    sample_parser = commands.add_parser("sample", parents=[common], help="sample eta")
    sample_parser.add_argument("--n", type=int, default=SampleDefaultValues.count)
    sample_parser.add_argument("--seed", type=int, default=None)
    sample_parser.add_argument("--ks", action="store_true")
    sample_parser.add_argument("--threshold", type=float, default=SampleDefaultValues.threshold)
    sample_parser.add_argument("--grid-size", type=int, default=SampleDefaultValues.grid_size)
    sample_parser.set_defaults(handler=cmd_sample)

    verify_parser = commands.add_parser("verify", parents=[common], help="run the invariant suite")
    verify_parser.add_argument("--progress", action="store_true")
    verify_parser.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "plot" and args.samples < 2:
            parser.error("--samples must be at least 2")
        if args.command == "sample" and args.n < 1:
            parser.error("--n must be at least 1")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else ExitCode.usage

    logging.basicConfig(stream=sys.stderr, level=args.log_level, force=True)
    try:
        config = salemgen.open_config(args.config, log_level=args.log_level)
        return args.handler(args, config)
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return ExitCode.config
    except PointParseError as e:
        logger.error(f"Bad point: {e}")
        return ExitCode.usage
    except DistributionError as e:
        logger.error(str(e))
        return ExitCode.distribution
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return ExitCode.io
    except SalemgenError as e:
        logger.error(str(e))
        return ExitCode.usage


if __name__ == "__main__":
    sys.exit(main())
