"""
Banded Direct Factorization
===========================

LU with partial pivoting in LAPACK band storage (``gbtrf``/``gbtrs``).
Unknowns are ordered lexicographically with the shorter grid axis running
fastest, so the half bandwidth equals the shorter padded dimension.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import get_lapack_funcs

from ...core.config.system_config import SystemConfig
from ...core.exceptions import SolverError, ValidationError
from ...core.models import Field
from .operator import DiscreteOperator

logger = logging.getLogger('mwi.Factorization')


def band_ordering(shape: Tuple[int, int]) -> Tuple[np.ndarray, int]:
    """Ordering along the shorter axis of a 2D grid.

    Returns ``(order, bandwidth)`` where ``order[k]`` is the natural
    (row-major) index of the k-th unknown.
    """
    nz, nx = shape
    natural = np.arange(nz * nx)
    if nx <= nz:
        return natural, nx
    return natural.reshape(nz, nx).T.ravel(), nz


@dataclass(frozen=True, eq=False)
class BandedLU:
    """LU factors of a banded matrix under a symmetric permutation."""
    lu: np.ndarray
    pivots: np.ndarray
    bandwidth: int
    order: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[1]

    @classmethod
    def factor(cls, matrix: sp.spmatrix, order: np.ndarray, bandwidth: int,
               pivot_tolerance: float = SystemConfig.PIVOT_TOLERANCE,
               diagnostics: Optional[Dict[str, Any]] = None,
               frequency: Optional[float] = None) -> 'BandedLU':
        """Factor ``matrix`` (natural ordering) after permuting it by ``order``.

        Raises:
            SolverError: If a pivot falls below ``pivot_tolerance`` times the
                largest coefficient.
        """
        coo = sp.coo_matrix(matrix)
        n = coo.shape[0]
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        rows, cols = rank[coo.row], rank[coo.col]
        if np.any(np.abs(rows - cols) > bandwidth):
            raise ValueError("Matrix entries fall outside the declared band")

        kl = ku = bandwidth
        dtype = np.complex128 if np.iscomplexobj(coo.data) else np.float64
        ab = np.zeros((2 * kl + ku + 1, n), dtype=dtype, order='F')
        np.add.at(ab, (kl + ku + rows - cols, cols), coo.data)

        gbtrf, = get_lapack_funcs(('gbtrf',), (ab,))
        lu, pivots, info = gbtrf(ab, kl, ku)
        if info < 0:
            raise ValueError(f"gbtrf rejected argument {-info}")

        scale = float(np.abs(coo.data).max()) if coo.nnz else 0.0
        diagonal = np.abs(lu[kl + ku, :])
        weakest = int(np.argmin(diagonal))
        if info > 0 or diagonal[weakest] < pivot_tolerance * scale:
            details = dict(diagnostics or {})
            details.update({'pivot': float(diagonal[weakest]), 'pivot_row': weakest,
                            'max_coefficient': scale})
            raise SolverError("Numerically singular matrix: pivot below tolerance",
                              frequency=frequency, diagnostics=details)

        return cls(lu=lu, pivots=pivots, bandwidth=bandwidth, order=np.asarray(order))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for one right-hand side (n,) or many (n, k), natural ordering."""
        rhs = np.asarray(rhs)
        if rhs.shape[0] != self.n:
            raise ValidationError(f"Right-hand side has {rhs.shape[0]} rows, expected {self.n}",
                                  field='rhs')
        if np.iscomplexobj(rhs) and not np.iscomplexobj(self.lu):
            return self.solve(rhs.real) + 1j * self.solve(rhs.imag)

        columns = rhs.reshape(self.n, -1)[self.order].astype(self.lu.dtype)
        gbtrs, = get_lapack_funcs(('gbtrs',), (self.lu,))
        solution, info = gbtrs(self.lu, self.bandwidth, self.bandwidth, columns, self.pivots)
        if info != 0:
            raise ValueError(f"gbtrs rejected argument {-info}")

        result = np.empty_like(solution)
        result[self.order] = solution
        return result.reshape(rhs.shape)


@dataclass(frozen=True, eq=False)
class Factorization:
    """Banded LU factors of one padded Helmholtz operator.

    Immutable; solves for many sources may share one instance.
    """
    operator: DiscreteOperator
    factors: BandedLU

    @property
    def bandwidth(self) -> int:
        return self.factors.bandwidth

    @property
    def shape(self) -> Tuple[int, int]:
        return self.operator.shape

    @property
    def omega(self) -> float:
        return self.operator.omega

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """u with A u = rhs for flattened padded grids, one column per source."""
        return self.factors.solve(rhs)

    def solve_adjoint(self, rhs: np.ndarray) -> np.ndarray:
        """v with A^H v = rhs; A is complex symmetric so A^H = conj(A)."""
        return np.conj(self.factors.solve(np.conj(rhs)))


def factorize(op: DiscreteOperator) -> Factorization:
    """Factor an assembled operator."""
    order, bandwidth = band_ordering(op.shape)
    diagnostics = {'model_min': op.model_extremes[0], 'model_max': op.model_extremes[1],
                   'bandwidth': bandwidth}
    factors = BandedLU.factor(op.to_sparse(), order, bandwidth,
                              diagnostics=diagnostics, frequency=op.frequency)
    logger.debug("Factorized operator",
                 extra={'frequency_hz': op.frequency, 'nodes': op.n_nodes, 'bandwidth': bandwidth})
    return Factorization(operator=op, factors=factors)


def _check_field(fac: Factorization, source: Field) -> None:
    if source.shape != fac.shape or source.pml_cells != fac.operator.pml_cells:
        raise ValidationError(
            f"Source grid {source.shape} does not match the factorized grid {fac.shape}",
            field='source',
        )


def solve_forward(fac: Factorization, source: Field) -> Field:
    """Field u with A u = source."""
    _check_field(fac, source)
    values = fac.solve(source.values.ravel()).reshape(fac.shape)
    return Field(values=values, pml_cells=source.pml_cells, h=source.h)


def solve_adjoint(fac: Factorization, source: Field) -> Field:
    """Field v with A^H v = source."""
    _check_field(fac, source)
    values = fac.solve_adjoint(source.values.ravel()).reshape(fac.shape)
    return Field(values=values, pml_cells=source.pml_cells, h=source.h)
