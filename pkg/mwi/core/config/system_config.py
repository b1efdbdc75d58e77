"""
System Configuration
====================

Centralized numerical constants and defaults shared by the engine,
the inversion loop and the command-line layer.
"""

import os
from typing import Dict, Any


class SystemConfig:
    """Centralized system configuration and constants."""

    # Discretization
    DEFAULT_PML_CELLS: int = 12
    MIN_PML_CELLS: int = 8
    PML_REFLECTION: float = 1e-3  # theoretical normal-incidence reflection
    MIN_POINTS_PER_WAVELENGTH: float = 6.0
    MIN_GRID_POINTS: int = 3

    # Direct solver
    PIVOT_TOLERANCE: float = 1e-14  # relative to the largest coefficient

    # Wavelet and frequency band
    DEFAULT_FREQUENCY_COUNT: int = 8
    BAND_LOW_FRACTION: float = 0.4
    BAND_HIGH_FRACTION: float = 1.6

    # Preconditioning
    PSEUDO_HESSIAN_BETA: float = 1e-3
    GN_EPS_FRACTION: float = 1e-2

    # Outer loop
    DEFAULT_MU: float = 1.0
    STEP_FRACTION: float = 0.02

    # Total variation prox
    TV_INNER_ITERATIONS: int = 50
    TV_TOLERANCE: float = 1e-6
    TV_LIPSCHITZ: float = 8.0

    # Camembert transmission model (meters, m/s)
    CAMEMBERT_WIDTH: float = 4800.0
    CAMEMBERT_DEPTH: float = 6000.0
    CAMEMBERT_BACKGROUND_VELOCITY: float = 4000.0
    CAMEMBERT_ANOMALY_VELOCITY: float = 4600.0
    CAMEMBERT_DIAMETER_FRACTION: float = 0.4

    # Two-layer reflection model (meters, m/s)
    TWO_LAYER_WIDTH: float = 9000.0
    TWO_LAYER_DEPTH: float = 1500.0
    TWO_LAYER_TOP_THICKNESS: float = 600.0
    TWO_LAYER_TOP_VELOCITY: float = 2000.0
    TWO_LAYER_BOTTOM_VELOCITY: float = 4000.0

    # Acquisition
    DEFAULT_STANDOFF_CELLS: int = 2

    # File formats
    MODEL_MAGIC: str = 'MWI-MODEL'
    DATA_MAGIC: str = 'MWI-DATA'
    CHECKPOINT_SIDECAR: str = 'checkpoint.txt'
    DEFAULT_ENCODING: str = 'utf-8'

    # Parallelism
    THREADS_ENV_VAR: str = 'MWI_THREADS'

    # Logging
    DEFAULT_LOG_LEVEL: str = 'WARNING'

    @classmethod
    def worker_count(cls, n_tasks: int) -> int:
        """Number of worker threads for ``n_tasks`` independent frequency tasks.

        ``MWI_THREADS`` caps the pool; 0, unset or unparsable means one worker
        per CPU.
        """
        raw = os.environ.get(cls.THREADS_ENV_VAR, '0').strip()
        try:
            cap = int(raw)
        except ValueError:
            cap = 0
        if cap <= 0:
            cap = os.cpu_count() or 1
        return max(1, min(cap, n_tasks))

    @classmethod
    def get_all_constants(cls) -> Dict[str, Any]:
        """Get all configuration constants as a dictionary.

        Returns:
            Dictionary of all configuration constants
        """
        return {
            name: value for name, value in cls.__dict__.items()
            if not name.startswith('_') and not callable(value)
            and not isinstance(value, classmethod)
        }

    @classmethod
    def validate_config(cls) -> bool:
        """Validate that configuration values are reasonable.

        Returns:
            True if configuration is valid

        Raises:
            ValueError: If configuration is invalid
        """
        positive_int_fields = [
            'DEFAULT_PML_CELLS', 'MIN_PML_CELLS', 'MIN_GRID_POINTS',
            'DEFAULT_FREQUENCY_COUNT', 'TV_INNER_ITERATIONS',
        ]
        for field in positive_int_fields:
            value = getattr(cls, field)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{field} must be a positive integer, got {value}")

        positive_float_fields = [
            'PML_REFLECTION', 'MIN_POINTS_PER_WAVELENGTH', 'PIVOT_TOLERANCE',
            'BAND_LOW_FRACTION', 'BAND_HIGH_FRACTION',
            'PSEUDO_HESSIAN_BETA', 'GN_EPS_FRACTION', 'DEFAULT_MU', 'STEP_FRACTION',
            'TV_TOLERANCE', 'TV_LIPSCHITZ', 'CAMEMBERT_WIDTH', 'CAMEMBERT_DEPTH',
            'CAMEMBERT_BACKGROUND_VELOCITY', 'CAMEMBERT_ANOMALY_VELOCITY',
            'CAMEMBERT_DIAMETER_FRACTION', 'TWO_LAYER_WIDTH', 'TWO_LAYER_DEPTH',
            'TWO_LAYER_TOP_THICKNESS', 'TWO_LAYER_TOP_VELOCITY',
            'TWO_LAYER_BOTTOM_VELOCITY',
        ]
        for field in positive_float_fields:
            value = getattr(cls, field)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(f"{field} must be a positive number, got {value}")

        if cls.DEFAULT_PML_CELLS < cls.MIN_PML_CELLS:
            raise ValueError("DEFAULT_PML_CELLS must not be below MIN_PML_CELLS")
        if not cls.PML_REFLECTION < 1.0:
            raise ValueError("PML_REFLECTION must be below 1")
        if not cls.BAND_LOW_FRACTION < cls.BAND_HIGH_FRACTION:
            raise ValueError("BAND_LOW_FRACTION must be below BAND_HIGH_FRACTION")
        # ‖∇‖² reaches 8 for forward differences in 2D
        if cls.TV_LIPSCHITZ < 8.0:
            raise ValueError("TV_LIPSCHITZ must be at least 8")

        string_fields = ['MODEL_MAGIC', 'DATA_MAGIC', 'DEFAULT_ENCODING', 'DEFAULT_LOG_LEVEL']
        for field in string_fields:
            value = getattr(cls, field)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"{field} must be a non-empty string, got {value}")

        return True
