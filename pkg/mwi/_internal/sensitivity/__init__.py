"""
Sensitivity Operators
=====================

Reduced forward map, adjoint-state gradient, Jacobian actions, Hessian
approximations and the update directions built from them.
"""

from .simulator import FrequencySolution, Simulator, forward_map
from .gradients import (
    apply_data_hessian_inverse, damp_pseudo_hessian, data_domain_hessian, default_gn_eps,
    gn_modified_gradient, jacobian_apply, jacobian_transpose, misfit_and_gradient,
    pseudo_hessian_diag, receiver_loads,
)
from .directions import DataGaussNewtonDirection, PseudoHessianDirection, build_direction_strategy

__all__ = [
    'FrequencySolution', 'Simulator', 'forward_map',
    'apply_data_hessian_inverse', 'damp_pseudo_hessian', 'data_domain_hessian',
    'default_gn_eps', 'gn_modified_gradient', 'jacobian_apply', 'jacobian_transpose',
    'misfit_and_gradient', 'pseudo_hessian_diag', 'receiver_loads',
    'DataGaussNewtonDirection', 'PseudoHessianDirection', 'build_direction_strategy',
]
