"""
Command Line Interface

    rscl run      --config path [--out dir] [--solver rscl|entropy|ghs]
    rscl sweep    --config path --axis ell --values 0.2,0.1,0.05 [--comparison entropy]
    rscl check    --config path [--out dir]
    rscl validate --config path

Exit codes: 0 all checks pass, 1 check failure or solver error, 2 config error.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from .config import ScenarioConfig
from .config import config as settings
from .diagnostics import run_check_suite
from .error_handler import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    ConfigError,
    ConfigViolation,
    ErrorContext,
    error_handler,
    log_info,
    log_warning,
    logger,
)
from .parser_service import ConfigParserService
from .path_service import PathService
from .reference import entropy_solve, ghs_solve
from .rscl_core import Trajectory, run
from .sweep_service import AXES, COMPARISONS, SweepSpec, run_sweep
from .writer_service import WriterService

SOLVERS: Dict[str, Callable[[ScenarioConfig], Trajectory]] = {
    "rscl": run,
    "entropy": entropy_solve,
    "ghs": ghs_solve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario document")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common.add_argument("--workers", type=int, default=None, help="worker cap (overrides SOLVER_WORKERS)")

    parser = argparse.ArgumentParser(
        prog="rscl",
        description="Solvers for the Hamiltonian regularization of scalar conservation laws",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    run_cmd = verbs.add_parser("run", parents=[common], help="integrate one scenario")
    run_cmd.add_argument("--out", default=None, help="output directory")
    run_cmd.add_argument("--solver", choices=sorted(SOLVERS), default="rscl")

    sweep_cmd = verbs.add_parser("sweep", parents=[common], help="run a parameter ladder")
    sweep_cmd.add_argument("--out", default=None, help="output directory")
    sweep_cmd.add_argument("--axis", choices=AXES, required=True)
    sweep_cmd.add_argument("--values", required=True, help="comma-separated ladder")
    sweep_cmd.add_argument("--comparison", choices=COMPARISONS, default="self")

    check_cmd = verbs.add_parser("check", parents=[common], help="run the diagnostics suite")
    check_cmd.add_argument("--out", default=None, help="output directory")

    verbs.add_parser("validate", parents=[common], help="validate a scenario document")
    return parser


def _load(path: str, parser: Optional[ConfigParserService] = None) -> ScenarioConfig:
    ok, message = PathService().validate_scenario_path(path)
    if not ok:
        raise ConfigError([ConfigViolation(0, "config", message)])
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    return (parser or ConfigParserService()).parse(text)


def _check_settings() -> None:
    """Runtime settings from the environment; errors abort like a bad document."""
    result = settings.validate_config()
    for warning in result["warnings"]:
        log_warning(f"settings: {warning}")
    if not result["valid"]:
        raise ConfigError([ConfigViolation(0, "environment", error) for error in result["errors"]])


def _ladder(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError([ConfigViolation(0, "--values", f"expected comma-separated numbers, got '{text}'")]) from None


def _output_dir(config: ScenarioConfig, override: Optional[str]):
    paths = PathService()
    return paths.ensure_directory(paths.resolve_output_dir(config, override))


def cmd_run(args: argparse.Namespace) -> int:
    config = _load(args.config)
    trajectory = SOLVERS[args.solver](config)
    WriterService().write_outputs(_output_dir(config, args.out), trajectory, config.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args.config)
    spec = SweepSpec(config, args.axis, tuple(_ladder(args.values)), args.comparison)
    report = run_sweep(spec, args.workers)
    directory = _output_dir(config, args.out)
    WriterService().write_reports(directory / f"{config.output.name}_sweep.ndjson", report.to_dicts())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_check(args: argparse.Namespace) -> int:
    config = _load(args.config)
    trajectory = run(config)
    reports = run_check_suite(trajectory)
    directory = _output_dir(config, args.out)
    WriterService().write_reports(directory / f"{config.output.name}_checks.ndjson", reports)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        log_info(f"{config.output.name}: failed checks: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    parser = ConfigParserService()
    _load(args.config, parser)
    for warning in parser.warnings:
        print(f"warning: {warning}")
    print(f"{args.config}: valid")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "check": cmd_check,
    "validate": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logger.set_level(logging.DEBUG)

    with ErrorContext(error_handler, args.verb) as ctx:
        _check_settings()
        return COMMANDS[args.verb](args)
    if ctx.exit_code == EXIT_CONFIG_ERROR and isinstance(error_handler.last_error, ConfigError):
        for violation in error_handler.last_error.violations:
            print(f"error: {violation}", file=sys.stderr)
    return ctx.exit_code


if __name__ == "__main__":
    sys.exit(main())
