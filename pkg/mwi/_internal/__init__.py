"""
MWI Internal Module
===================

Numerical kernels: Helmholtz discretization and solves, sensitivities,
proximal operators and binary storage.
"""

from .helmholtz import assemble, factorize
from .sensitivity import Simulator, forward_map, misfit_and_gradient
from .regularization import apply_prox, reg_value

__all__ = [
    "assemble",
    "factorize",
    "Simulator",
    "forward_map",
    "misfit_and_gradient",
    "apply_prox",
    "reg_value",
]
