"""
MWI Core Interfaces
===================

Minimal interfaces for the pluggable pieces of a model step.
"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from .models import Acquisition, Model, ShotData


class ProximalOperator(ABC):
    """Proximal map of a regularizer R."""

    @abstractmethod
    def prox(self, image: np.ndarray, scale: float) -> np.ndarray:
        """
        argmin_x ½‖x - image‖² + scale · R(x).

        Args:
            image: 2D model grid
            scale: Positive step multiplier on the regularizer

        Returns:
            New 2D grid of the same shape
        """
        pass

    @abstractmethod
    def value(self, image: np.ndarray) -> float:
        """R(image)."""
        pass


class DirectionStrategy(ABC):
    """Turns a data residual into a model-update direction."""

    @abstractmethod
    def residual_gradient(self, model: 'Model', acq: 'Acquisition', residual: 'ShotData',
                          simulator) -> np.ndarray:
        """
        Back-project a data residual onto the model grid.

        Args:
            model: Model the residual was computed at
            acq: Acquisition geometry
            residual: Weighted residual cube
            simulator: Cached simulator for ``model``

        Returns:
            Interior grid (unpreconditioned)
        """
        pass

    @abstractmethod
    def preconditioner(self, model: 'Model', acq: 'Acquisition', simulator) -> Optional[np.ndarray]:
        """
        Positive diagonal the back-projection is divided by, or None.

        Args:
            model: Current model
            acq: Acquisition geometry
            simulator: Cached simulator for ``model``
        """
        pass
