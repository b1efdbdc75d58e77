"""
Helmholtz Engine
================

PML operator assembly, banded factorization, forward/adjoint solves,
sampling/injection and the Ricker source spectrum.
"""

from .operator import DiscreteOperator, assemble, padding_index, points_per_wavelength
from .factorization import (
    BandedLU, Factorization, band_ordering, factorize, solve_adjoint, solve_forward
)
from .sampling import (
    field_inner, inject, node_indices, padded_shape, ricker_spectrum, sample, source_terms
)

__all__ = [
    'DiscreteOperator', 'assemble', 'padding_index', 'points_per_wavelength',
    'BandedLU', 'Factorization', 'band_ordering', 'factorize', 'solve_adjoint', 'solve_forward',
    'field_inner', 'inject', 'node_indices', 'padded_shape', 'ricker_spectrum', 'sample',
    'source_terms',
]
