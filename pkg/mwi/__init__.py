"""
MWI: Multipliers Waveform Inversion
===================================

2D frequency-domain acoustic full-waveform inversion. Penalty FWI and
multipliers waveform inversion (the observed data replaced by a running
sum of data residuals) share one preconditioned gradient loop.

Core Features:
- PML Helmholtz operator with banded direct solves
- Adjoint-state gradients, pseudo-Hessian and data-domain Gauss-Newton
- Tikhonov and total-variation proximal regularization
- Frequency continuation and YAML run manifests

Example Usage:
    from mwi import (RunConfig, build_acquisition, forward_map, make_camembert,
                     make_homogeneous, run_inversion)

    truth = make_camembert(h=142.0)
    initial = make_homogeneous(truth.nx, truth.nz, truth.h, 4000.0,
                               v_min=4000.0, v_max=4600.0)
    acq = build_acquisition(initial, 7, 'top', 34, 'bottom', f_p=5.0)
    observed = forward_map(truth, acq)

    state = run_inversion(RunConfig(method='mwi', iterations=20, truth=truth),
                          acq, observed, initial)
    print(state.log[-1].model_rmse)
"""

from .core import (
    # Core models
    Acquisition, Field, GradientBundle, InversionState, IterationRecord, Model, Regularizer,
    ShotData,

    # Engine
    InversionEngine, frequency_continuation, model_step, multiplier_step, run_inversion,
    unscaled_al_iteration,

    # Exceptions
    ConfigurationError, InversionAborted, ManifestError, MwiError, NumericalError, SolverError,
    ValidationError,

    # Configuration
    RunConfig, SystemConfig,
)
from .core.services import (
    build_acquisition, check_dispersion, emit_outputs, make_camembert, make_homogeneous,
    make_two_layer, model_rmse, parse_manifest, project_bounds, resample_model, ricker_band,
)
from .core.services.diagnostics import equivalence_check, gradient_check
from ._internal.helmholtz import assemble, factorize, inject, sample, solve_adjoint, solve_forward
from ._internal.sensitivity import (
    forward_map, gn_modified_gradient, jacobian_apply, misfit_and_gradient, pseudo_hessian_diag,
)
from ._internal.regularization import apply_prox, reg_value
from ._internal.storage import read_model, read_shot_data, write_model, write_shot_data

__version__ = "0.1.0"
__author__ = "MWI Team"

__all__ = [
    # Core models
    'Acquisition', 'Field', 'GradientBundle', 'InversionState', 'IterationRecord', 'Model',
    'Regularizer', 'ShotData',

    # Model space
    'make_homogeneous', 'make_camembert', 'make_two_layer', 'project_bounds', 'resample_model',
    'model_rmse',

    # Helmholtz engine
    'assemble', 'factorize', 'solve_forward', 'solve_adjoint', 'sample', 'inject',
    'build_acquisition', 'check_dispersion', 'ricker_band',

    # Sensitivities
    'forward_map', 'misfit_and_gradient', 'jacobian_apply', 'pseudo_hessian_diag',
    'gn_modified_gradient',

    # Regularizers
    'apply_prox', 'reg_value',

    # Inversion
    'InversionEngine', 'RunConfig', 'model_step', 'multiplier_step', 'run_inversion',
    'unscaled_al_iteration', 'frequency_continuation',

    # I/O and diagnostics
    'parse_manifest', 'emit_outputs', 'read_model', 'write_model', 'read_shot_data',
    'write_shot_data', 'gradient_check', 'equivalence_check',

    # Exceptions
    'MwiError', 'ValidationError', 'ConfigurationError', 'ManifestError', 'NumericalError',
    'SolverError', 'InversionAborted',

    # Configuration and metadata
    'SystemConfig', '__version__', '__author__',
]


def get_info():
    """Get package information."""
    return {
        "name": "mwi",
        "version": __version__,
        "description": "Frequency-domain acoustic FWI by the method of multipliers",
        "core_features": [
            "PML Helmholtz modeling with banded LU",
            "Adjoint-state gradients and preconditioners",
            "Penalty FWI and multipliers waveform inversion",
            "TV and Tikhonov proximal regularization",
        ],
    }
