"""
MWI Core Package
================

Domain models, configuration, errors and the inversion engine.
"""

from .models import (
    Acquisition, Field, GradientBundle, InversionState, IterationRecord, Model, Regularizer, ShotData,
)
from .engine import (
    InversionEngine, frequency_continuation, model_step, multiplier_step, run_inversion,
    unscaled_al_iteration,
)
from .exceptions import (
    ConfigurationError, InversionAborted, ManifestError, MwiError, NumericalError, SolverError,
    ValidationError,
)
from .interfaces import DirectionStrategy, ProximalOperator
from .config import RunConfig, SystemConfig

__all__ = [
    # Core models
    'Acquisition', 'Field', 'GradientBundle', 'InversionState', 'IterationRecord', 'Model',
    'Regularizer', 'ShotData',

    # Engine
    'InversionEngine', 'frequency_continuation', 'model_step', 'multiplier_step',
    'run_inversion', 'unscaled_al_iteration',

    # Exceptions
    'ConfigurationError', 'InversionAborted', 'ManifestError', 'MwiError', 'NumericalError',
    'SolverError', 'ValidationError',

    # Interfaces
    'DirectionStrategy', 'ProximalOperator',

    # Configuration
    'RunConfig', 'SystemConfig',
]
