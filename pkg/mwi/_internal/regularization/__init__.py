"""
Regularization
==============

Proximal operators for none, Tikhonov and total-variation regularization.
"""

from .prox import (
    IdentityProx, TikhonovProx, TotalVariationProx, apply_prox, build_proximal_operator,
    divergence, forward_gradient, neumann_laplacian, reg_value,
)

__all__ = [
    'IdentityProx', 'TikhonovProx', 'TotalVariationProx', 'apply_prox',
    'build_proximal_operator', 'divergence', 'forward_gradient', 'neumann_laplacian',
    'reg_value',
]
