"""
Update Direction Strategies
===========================

- ``PseudoHessianDirection``: J^t r divided by the damped pseudo-Hessian
  diagonal.
- ``DataGaussNewtonDirection``: J^t Q^{-1} r with the data-domain
  Gauss-Newton matrix Q = S S^H + εI, divided by the same damped diagonal.
"""

from typing import Optional

import numpy as np

from ...core.config.run_config import RunConfig
from ...core.config.system_config import SystemConfig
from ...core.interfaces import DirectionStrategy
from ...core.models import Acquisition, Model, ShotData
from .gradients import (
    apply_data_hessian_inverse, damp_pseudo_hessian, jacobian_transpose, pseudo_hessian_diag,
)
from .simulator import Simulator


class PseudoHessianDirection(DirectionStrategy):
    """Diagonally preconditioned gradient."""

    def __init__(self, beta: float = SystemConfig.PSEUDO_HESSIAN_BETA):
        self.beta = beta

    def residual_gradient(self, model: Model, acq: Acquisition, residual: ShotData,
                          simulator: Simulator) -> np.ndarray:
        return jacobian_transpose(model, acq, residual, simulator)

    def preconditioner(self, model: Model, acq: Acquisition,
                       simulator: Simulator) -> Optional[np.ndarray]:
        return damp_pseudo_hessian(pseudo_hessian_diag(model, acq, simulator), self.beta)


class DataGaussNewtonDirection(DirectionStrategy):
    """Gauss-Newton modified gradient from the data-domain Hessian.

    The pseudo-Hessian diagonal stands in for the image-space Hessian, so the
    step minimizes the quadratic model with the data term weighted by Q^{-1}.
    """

    def __init__(self, eps: Optional[float] = None,
                 beta: float = SystemConfig.PSEUDO_HESSIAN_BETA):
        self.eps = eps
        self.beta = beta

    def residual_gradient(self, model: Model, acq: Acquisition, residual: ShotData,
                          simulator: Simulator) -> np.ndarray:
        modified = apply_data_hessian_inverse(model, acq, residual, self.eps, simulator)
        return jacobian_transpose(model, acq, modified, simulator)

    def preconditioner(self, model: Model, acq: Acquisition,
                       simulator: Simulator) -> Optional[np.ndarray]:
        return damp_pseudo_hessian(pseudo_hessian_diag(model, acq, simulator), self.beta)


def build_direction_strategy(cfg: RunConfig) -> DirectionStrategy:
    if cfg.gn_data_hessian:
        return DataGaussNewtonDirection(cfg.gn_eps, cfg.pseudo_hessian_beta)
    return PseudoHessianDirection(cfg.pseudo_hessian_beta)
