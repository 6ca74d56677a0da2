"""
Command-line front end of the circulant curvature verifier

Exit codes:
    0  success
    1  a check failed
    2  input error (malformed instance, unknown suite, vector without a Q-basis)
    3  numeric error (singular matrix, degenerate plane, isotropic direction)
    4  domain precondition violated (positivity, degenerate associated metric)
"""

import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from ..core.analysis import CurvatureAnalyzer
from ..core.errors import EXIT_CHECK_FAILURE, EXIT_SUCCESS, CirculantGeometryError, ParseError
from ..core.instances import load_instance
from ..core.verifier import SUITE_NAMES, SuiteRunner
from ..utils.config import VerifierConfig, load_config
from ..utils.logger import get_logger, setup_logger
from ..utils.serialization import dumps_canonical, write_canonical
from .report_formatter import format_sectional, format_suites


log = get_logger("CLI")


def parse_vector(text: str) -> List[str]:
    """
    Parse "a,b,c" into three rational strings

    Raises:
        ParseError: not three comma-separated numbers
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ParseError(f"Vector must have three components, got '{text}'")
    for part in parts:
        try:
            Fraction(part)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"Vector component '{part}' is not a number") from exc
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circulant_verify",
        description="Curvature of circulant Riemannian 3-manifolds and their associated metrics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Full analysis of an instance file
  python circulant_verify.py analyze data/instances/lie_family1.json

  # Same instance in float arithmetic, report written to a file
  python circulant_verify.py analyze data/instances/lie_family1.json --float --out report.json

  # Run every property suite
  python circulant_verify.py verify all --samples 200 --seed 42

  # Q-plane data of one vector
  python circulant_verify.py sectional data/instances/lie_family1.json --vector 1,0,0
        """,
    )
    parser.add_argument("--config", help="Configuration file (default: config/verifier_config.json)")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Override the configured log level")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Analysis command
    analyze_parser = subparsers.add_parser("analyze", help="Run the full pipeline on an instance file")
    analyze_parser.add_argument("input", help="Instance file (JSON)")
    analyze_parser.add_argument("--out", help="Write the report here instead of stdout")
    arithmetic = analyze_parser.add_mutually_exclusive_group()
    arithmetic.add_argument("--exact", dest="arithmetic", action="store_const", const="exact",
                            help="Rational arithmetic")
    arithmetic.add_argument("--float", dest="arithmetic", action="store_const", const="float",
                            help="Floating-point arithmetic")
    analyze_parser.add_argument("--tolerance", type=float, help="eps_rel = eps_abs for residual checks")

    # Verification command
    verify_parser = subparsers.add_parser("verify", help="Run a property suite")
    verify_parser.add_argument("suite", help=f"One of: {', '.join(SUITE_NAMES)}, all")
    verify_parser.add_argument("--samples", type=int, help="Samples per suite (default: from config)")
    verify_parser.add_argument("--seed", type=int, help="Seed (default: from config)")
    verify_parser.add_argument("--tolerance", type=float, help="eps_rel = eps_abs for residual checks")
    verify_parser.add_argument("--json", action="store_true", help="Print the canonical JSON summary")
    verify_parser.add_argument("--out", help="Also write the JSON summary here")

    # Sectional command
    sectional_parser = subparsers.add_parser("sectional", help="Q-plane data of one vector")
    sectional_parser.add_argument("input", help="Instance file (JSON)")
    sectional_parser.add_argument("--vector", required=True, help="Components a,b,c (numbers or p/q)")
    sectional_parser.add_argument("--json", action="store_true", help="Print canonical JSON instead of a table")

    return parser


def cmd_analyze(args: argparse.Namespace, config: VerifierConfig) -> int:
    if args.tolerance is not None:
        config = config.with_tolerance(args.tolerance)
    spec = load_instance(args.input).with_arithmetic(args.arithmetic)
    report = CurvatureAnalyzer(config).analyze(spec)
    text = write_canonical(report, args.out)
    if args.out is None:
        sys.stdout.write(text)
    else:
        log.info(f"Report written to {args.out}")
    return EXIT_SUCCESS if report.passed else EXIT_CHECK_FAILURE


def cmd_verify(args: argparse.Namespace, config: VerifierConfig) -> int:
    runner = SuiteRunner(config, samples=args.samples, seed=args.seed, tolerance=args.tolerance)
    results = runner.run(args.suite)
    summary = {"passed": all(r.passed for r in results), "suites": [r.to_dict() for r in results]}
    if args.out:
        write_canonical(summary, args.out)
    sys.stdout.write(dumps_canonical(summary) if args.json else format_suites(results))
    return EXIT_SUCCESS if summary["passed"] else EXIT_CHECK_FAILURE


def cmd_sectional(args: argparse.Namespace, config: VerifierConfig) -> int:
    vector = parse_vector(args.vector)
    spec = load_instance(args.input)
    report = CurvatureAnalyzer(config).sectional(spec, vector)
    sys.stdout.write(dumps_canonical(report) if args.json else format_sectional(report))
    return EXIT_SUCCESS


COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "sectional": cmd_sectional,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_SUCCESS

    try:
        config = load_config(args.config)
    except (OSError, ValueError) as exc:
        setup_logger("ERROR")
        log.error(f"Cannot load configuration: {exc}")
        return ParseError.exit_code
    if args.log_level:
        config.log_level = args.log_level
    setup_logger(config.log_level, config.log_file())

    try:
        return COMMANDS[args.command](args, config)
    except CirculantGeometryError as exc:
        log.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
    except KeyboardInterrupt:
        log.warning("Operation cancelled by user")
        return EXIT_CHECK_FAILURE
