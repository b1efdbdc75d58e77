"""
Command-Line Interface
======================

Subcommands::

    mwi model make {camembert|two-layer|homogeneous} --h H --out FILE
    mwi model resample --in FILE --factor {0.5,2.0} --out FILE
    mwi forward --manifest FILE
    mwi invert --manifest FILE
    mwi gradcheck [--grid NXxNZ]
    mwi equivalence-check

Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from .core.config.system_config import SystemConfig
from .core.exceptions import (
    ConfigurationError, InversionAborted, NumericalError, ValidationError, configure_mwi_logging,
)
from .core.services.diagnostics import equivalence_check, gradient_check
from .core.services.experiment import prepare_experiment, run_experiment
from .core.services.manifest_loader import parse_manifest
from .core.services.model_builder import (
    RESAMPLE_FACTORS, make_camembert, make_homogeneous, make_two_layer, resample_model,
)
from .core.services.output_writer import OutputWriter
from ._internal.sensitivity import forward_map
from ._internal.storage import read_model, write_model, write_shot_data

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

logger = logging.getLogger('mwi.CLI')


class UsageError(Exception):
    """Bad command-line arguments; carries the usage text."""

    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message, self.format_usage())


def _grid(text: str) -> Tuple[int, int]:
    try:
        nx, nz = (int(part) for part in text.lower().split('x'))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 20x20, got '{text}'")
    return nx, nz


def _cmd_model_make(args: argparse.Namespace) -> int:
    if args.kind == 'camembert':
        model = make_camembert(args.h, args.diameter_fraction)
    elif args.kind == 'two-layer':
        model = make_two_layer(args.h)
    else:
        if args.velocity is None or args.nx is None or args.nz is None:
            raise ConfigurationError("homogeneous models need --velocity, --nx and --nz")
        model = make_homogeneous(args.nx, args.nz, args.h, args.velocity)
    write_model(args.out, model)
    print(f"wrote {args.out}: {model.nx} x {model.nz} at h={model.h:g}")
    return EXIT_OK


def _cmd_model_resample(args: argparse.Namespace) -> int:
    model = resample_model(read_model(args.input), args.factor)
    write_model(args.out, model)
    print(f"wrote {args.out}: {model.nx} x {model.nz} at h={model.h:g}")
    return EXIT_OK


def _cmd_forward(args: argparse.Namespace) -> int:
    manifest = parse_manifest(args.manifest)
    experiment = prepare_experiment(manifest)
    if experiment.truth is None:
        raise ConfigurationError("forward modeling needs a true model in the manifest",
                                 config_key='experiment.truth_model')
    writer = OutputWriter.for_manifest(manifest)
    observed = forward_map(experiment.truth, experiment.acquisition, manifest.run.pml_cells)
    write_shot_data(manifest.output.directory / 'observed.bin', observed)
    writer.write_model('model_true', experiment.truth)
    writer.write_gathers(observed, 'observed')
    print(f"wrote observed data {observed.shape} to {manifest.output.directory}")
    return EXIT_OK


def _cmd_invert(args: argparse.Namespace) -> int:
    manifest = parse_manifest(args.manifest)
    experiment = prepare_experiment(manifest)
    writer = OutputWriter.for_manifest(manifest)
    try:
        state = run_experiment(experiment, manifest, on_iteration=writer.snapshot)
    except InversionAborted as e:
        if e.state is not None:
            writer.emit(e.state, truth=experiment.truth)
        raise

    writer.emit(state, experiment.acquisition, experiment.observed, experiment.truth,
                manifest.run.pml_cells)
    final = state.log[-1] if state.log else None
    summary = f"{manifest.name}: {state.k} iterations"
    if final is not None:
        summary += f", E_true={final.e_true:.6e}"
        if final.model_rmse is not None:
            summary += f", model RMSE={final.model_rmse:.3f} m/s"
    print(summary)
    return EXIT_OK


def _cmd_gradcheck(args: argparse.Namespace) -> int:
    nx, nz = args.grid
    result = gradient_check(nx=nx, nz=nz, n_cells=args.cells, seed=args.seed)
    print(f"max relative FD error: {result.max_relative_error:.3e} "
          f"over {len(result.cells)} cells (tolerance {result.tolerance:g})")
    return EXIT_OK if result.passed else EXIT_NUMERICAL


def _cmd_equivalence(args: argparse.Namespace) -> int:
    result = equivalence_check(n=args.n, iterations=args.iterations, mu=args.mu)
    print(f"max model difference: {result.max_model_difference:.3e}; "
          f"max multiplier difference: {result.max_multiplier_difference:.3e} "
          f"(tolerance {result.tolerance:g})")
    return EXIT_OK if result.passed else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='mwi', description="Multipliers waveform inversion")
    parser.add_argument('--log-level', default=SystemConfig.DEFAULT_LOG_LEVEL,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest='command', required=True)

    model = commands.add_parser('model', help="build or resample model files")
    model_commands = model.add_subparsers(dest='model_command', required=True)

    make = model_commands.add_parser('make', help="write a synthetic model")
    make.add_argument('kind', choices=['camembert', 'two-layer', 'homogeneous'])
    make.add_argument('--h', type=float, required=True, help="grid spacing in meters")
    make.add_argument('--out', required=True)
    make.add_argument('--velocity', type=float, help="homogeneous velocity (m/s)")
    make.add_argument('--nx', type=int)
    make.add_argument('--nz', type=int)
    make.add_argument('--diameter-fraction', type=float,
                      default=SystemConfig.CAMEMBERT_DIAMETER_FRACTION)
    make.set_defaults(handler=_cmd_model_make)

    resample = model_commands.add_parser('resample', help="coarsen or refine a model file")
    resample.add_argument('--in', dest='input', required=True)
    resample.add_argument('--factor', type=float, required=True, choices=RESAMPLE_FACTORS)
    resample.add_argument('--out', required=True)
    resample.set_defaults(handler=_cmd_model_resample)

    forward = commands.add_parser('forward', help="model observed data from a manifest")
    forward.add_argument('--manifest', required=True)
    forward.set_defaults(handler=_cmd_forward)

    invert = commands.add_parser('invert', help="run the inversion described by a manifest")
    invert.add_argument('--manifest', required=True)
    invert.set_defaults(handler=_cmd_invert)

    gradcheck = commands.add_parser('gradcheck', help="finite-difference gradient check")
    gradcheck.add_argument('--grid', type=_grid, default=(20, 20))
    gradcheck.add_argument('--cells', type=int, default=20)
    gradcheck.add_argument('--seed', type=int, default=0)
    gradcheck.set_defaults(handler=_cmd_gradcheck)

    equivalence = commands.add_parser('equivalence-check',
                                      help="scaled vs unscaled multiplier iterations")
    equivalence.add_argument('--n', type=int, default=16)
    equivalence.add_argument('--iterations', type=int, default=5)
    equivalence.add_argument('--mu', type=float, default=2.0)
    equivalence.set_defaults(handler=_cmd_equivalence)
    return parser


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(e.usage)
        sys.stderr.write(f"mwi: error: {e}\n")
        return EXIT_CONFIG
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    configure_mwi_logging(args.log_level)
    try:
        return args.handler(args)
    except (ConfigurationError, ValidationError) as e:
        sys.stderr.write(f"mwi: {e}\n")
        return EXIT_CONFIG
    except NumericalError as e:
        sys.stderr.write(f"mwi: numerical failure: {e}\n")
        return EXIT_NUMERICAL
    except OSError as e:
        sys.stderr.write(f"mwi: I/O error: {e}\n")
        return EXIT_CONFIG


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(cli_main(argv))
