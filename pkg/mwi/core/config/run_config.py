"""
Run Configuration
=================

Settings of one inversion run: method, penalty parameter, iteration
budget, frequency subset, regularization, bounds and preconditioning.
"""

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .system_config import SystemConfig
from ..models import Model, Regularizer

METHODS = ('fwi', 'mwi')


@dataclass(frozen=True)
class RunConfig:
    """Configuration of a penalty FWI or MWI run."""
    method: str = 'mwi'
    mu: float = SystemConfig.DEFAULT_MU
    iterations: int = 0
    frequencies: Optional[Tuple[float, ...]] = None
    regularizer: Regularizer = field(default_factory=Regularizer)
    bounds: bool = True
    gn_data_hessian: bool = False
    gn_eps: Optional[float] = None
    step_fraction: float = SystemConfig.STEP_FRACTION
    step_length: Optional[float] = None
    pseudo_hessian_beta: float = SystemConfig.PSEUDO_HESSIAN_BETA
    pml_cells: int = SystemConfig.DEFAULT_PML_CELLS
    truth: Optional[Model] = field(default=None, compare=False)
    checkpoint_dir: Optional[Path] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"Method must be one of {METHODS}, got '{self.method}'")
        if not np.isfinite(self.mu) or self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not isinstance(self.iterations, int) or self.iterations < 0:
            raise ValueError(f"iterations must be a non-negative integer, got {self.iterations}")
        if self.frequencies is not None:
            object.__setattr__(self, 'frequencies', tuple(float(f) for f in self.frequencies))
            if not self.frequencies:
                raise ValueError("Frequency subset must not be empty")
        if self.gn_eps is not None and not self.gn_eps > 0:
            raise ValueError(f"gn_eps must be positive, got {self.gn_eps}")
        if not 0 < self.step_fraction <= 1:
            raise ValueError(f"step_fraction must lie in (0, 1], got {self.step_fraction}")
        if self.step_length is not None and not self.step_length > 0:
            raise ValueError(f"step_length must be positive, got {self.step_length}")
        if not self.pseudo_hessian_beta > 0:
            raise ValueError("pseudo_hessian_beta must be positive")
        if self.pml_cells < SystemConfig.MIN_PML_CELLS:
            raise ValueError(
                f"pml_cells must be at least {SystemConfig.MIN_PML_CELLS}, got {self.pml_cells}"
            )
        if self.checkpoint_dir is not None:
            object.__setattr__(self, 'checkpoint_dir', Path(self.checkpoint_dir))

    @property
    def is_mwi(self) -> bool:
        return self.method == 'mwi'

    @classmethod
    def defaults(cls) -> 'RunConfig':
        return cls()

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> 'RunConfig':
        """Create configuration from a flat dictionary.

        ``reg_kind``, ``reg_weight`` and ``reg_tv_inner_iters`` build the
        regularizer; unknown keys raise ValueError.
        """
        config = dict(config)
        reg_keys = {k: config.pop(k) for k in list(config) if k.startswith('reg_')}
        if reg_keys:
            config['regularizer'] = Regularizer(
                kind=reg_keys.pop('reg_kind', 'none'),
                weight=float(reg_keys.pop('reg_weight', 0.0)),
                tv_inner_iters=int(reg_keys.pop('reg_tv_inner_iters', SystemConfig.TV_INNER_ITERATIONS)),
            )
            if reg_keys:
                raise ValueError(f"Unknown regularizer keys: {sorted(reg_keys)}")
        known = {f.name for f in fields(cls)}
        unknown = set(config) - known
        if unknown:
            raise ValueError(f"Unknown run configuration keys: {sorted(unknown)}")
        return cls(**config)
