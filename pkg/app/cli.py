#!/usr/bin/env python3
"""
Command-line entry point of the rotating-sphere simulator.
Usage: python -m app.cli <run|verify|rossby|sweep> [options]

Exit codes: 0 success, 1 identity or criterion failure, 2 configuration error,
3 numerical divergence.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import scipy.fft as fft
from pydantic import ValidationError

from app.config import settings
from app.models.config_file import load_run_config, load_sweep_config
from app.models.simulation import RossbyRequest
from app.services.rossby_service import RossbyService
from app.services.simulation_service import SimulationService
from app.services.sweep_service import SweepService
from app.services.verification_service import VerificationService
from app.utils.errors import (
    ConfigError,
    DivergenceError,
    InvalidParameterError,
    SphereFlowError,
    StepSizeError,
)
from app.utils.log import configure_logging, get_logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

logger = get_logger(__name__)


def _require_config(args) -> Path:
    if args.config is None:
        raise ConfigError(f"'{args.command}' needs --config PATH")
    return Path(args.config)


def cmd_run(args) -> int:
    config = load_run_config(_require_config(args), seed=args.seed)
    out_dir = Path(args.out) if args.out else Path(config.output.dir)
    summary = SimulationService().run(config, out_dir)
    print(f"final c_z = {summary.final_c_z!r}")
    print(f"final residual = {summary.final_residual!r}")
    print(f"alpha = {summary.alpha!r} (r^2 = {summary.r_squared!r})")
    print(f"outputs written to {out_dir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    if args.L < settings.VERIFY_MIN_DEGREE:
        raise InvalidParameterError(f"verify needs --L >= {settings.VERIFY_MIN_DEGREE}, got {args.L}")
    service = VerificationService()
    reports = service.verify(args.L, args.a, seed)
    print(service.render_table(reports))
    return EXIT_OK if service.all_passed(reports) else EXIT_FAILED


def cmd_rossby(args) -> int:
    try:
        request = RossbyRequest(l=args.l, m=args.m, omega=args.omega, T=args.T, L=args.L, dt=args.dt)
    except ValidationError as e:
        raise ConfigError(f"invalid rossby parameters: {e}") from e
    service = RossbyService()
    result = service.measure(request)
    print(service.render(result), end="")
    if args.out:
        service.write(result, Path(args.out) / settings.ROSSBY_FILENAME)
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_sweep(args) -> int:
    config = load_sweep_config(_require_config(args), seed=args.seed)
    out_dir = Path(args.out) if args.out else Path(config.base.output.dir)
    service = SweepService(workers=args.threads)
    rows = service.run(config, out_dir)
    path = service.write(rows, out_dir)
    for row in rows:
        print(f"omega={row.omega!r} mu_s={row.mu_s!r} status={row.status}")
    print(f"sweep table written to {path}")
    return EXIT_OK if service.all_ok(rows) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run or sweep configuration file")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--threads", type=int, default=settings.FFT_WORKERS,
                        help="FFT worker threads; sweep pool size")
    common.add_argument("--seed", type=int, help="overrides init.seed and the verify seed")
    common.add_argument("--log-level", default=None, help="logging level (default from settings)")

    parser = argparse.ArgumentParser(description="Rotating-sphere incompressible flow simulator")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", parents=[common], help="run one simulation")
    run_parser.set_defaults(handler=cmd_run)

    verify_parser = subparsers.add_parser("verify", parents=[common], help="run the identity suite")
    verify_parser.add_argument("--L", type=int, default=settings.DEFAULT_DEGREE)
    verify_parser.add_argument("--a", type=float, default=settings.DEFAULT_RADIUS)
    verify_parser.set_defaults(handler=cmd_verify)

    rossby_parser = subparsers.add_parser("rossby", parents=[common], help="single-mode precession experiment")
    rossby_parser.add_argument("--l", type=int, default=2)
    rossby_parser.add_argument("--m", type=int, default=1)
    rossby_parser.add_argument("--omega", type=float, default=1.0)
    rossby_parser.add_argument("--T", type=float, default=20.0)
    rossby_parser.add_argument("--L", type=int, default=settings.DEFAULT_DEGREE)
    rossby_parser.add_argument("--dt", type=float, default=1e-2)
    rossby_parser.set_defaults(handler=cmd_rossby)

    sweep_parser = subparsers.add_parser("sweep", parents=[common], help="(omega, mu_s) parameter sweep")
    sweep_parser.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    configure_logging(args.log_level)

    try:
        with fft.set_workers(max(1, args.threads)):
            return args.handler(args)
    except (ConfigError, InvalidParameterError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, StepSizeError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as e:
        print(f"output error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SphereFlowError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
