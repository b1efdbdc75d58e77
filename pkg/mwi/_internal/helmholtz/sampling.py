"""
Sampling, Injection and Source Wavelet
======================================

P reads nodal values at receivers; P^t places point loads scaled by 1/h²
(the discrete delta used for sources). The pair is exactly adjoint in the
grid inner product h² Σ conj(a) b.
"""

import math
from typing import Sequence, Tuple, Union

import numpy as np

from ...core.config.system_config import SystemConfig
from ...core.exceptions import ValidationError
from ...core.models import Acquisition, Field, Position

ArrayLike = Union[float, np.ndarray]


def ricker_spectrum(f_p: float, f: ArrayLike) -> ArrayLike:
    """Amplitude spectrum of a zero-phase Ricker wavelet peaking at ``f_p``.

    W(f) = (2/√π) (f²/f_p³) exp(-(f/f_p)²)
    """
    if not np.isfinite(f_p) or f_p <= 0:
        raise ValidationError(f"Peak frequency must be positive, got {f_p}", field='f_p', value=f_p)
    f_arr = np.asarray(f, dtype=np.float64)
    if np.any(f_arr < 0) or not np.all(np.isfinite(f_arr)):
        raise ValidationError("Frequencies must be finite and non-negative", field='f')
    amplitude = (2.0 / math.sqrt(math.pi)) * (f_arr ** 2 / f_p ** 3) * np.exp(-(f_arr / f_p) ** 2)
    return float(amplitude) if amplitude.ndim == 0 else amplitude


def padded_shape(acq: Acquisition, pml_cells: int) -> Tuple[int, int]:
    return (acq.nz + 2 * pml_cells, acq.nx + 2 * pml_cells)


def node_indices(positions: Sequence[Position], acq: Acquisition, pml_cells: int) -> np.ndarray:
    """Flat natural indices of interior positions on the padded grid."""
    nxp = acq.nx + 2 * pml_cells
    rows = np.array([iz for iz, _ in positions], dtype=np.int64) + pml_cells
    cols = np.array([ix for _, ix in positions], dtype=np.int64) + pml_cells
    return rows * nxp + cols


def _check_grid(field: Field, acq: Acquisition) -> None:
    if field.interior.shape != (acq.nz, acq.nx):
        raise ValidationError(
            f"Field interior {field.interior.shape} does not match the acquisition grid "
            f"{(acq.nz, acq.nx)}",
            field='field',
        )


def sample(field: Field, acq: Acquisition) -> np.ndarray:
    """Field values at the receiver nodes (length N_r)."""
    _check_grid(field, acq)
    return field.values.ravel()[node_indices(acq.receivers, acq, field.pml_cells)].copy()


def inject(values: np.ndarray, acq: Acquisition,
           pml_cells: int = SystemConfig.DEFAULT_PML_CELLS) -> Field:
    """Point loads ``values / h²`` at the receiver nodes."""
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (acq.n_receivers,):
        raise ValidationError(f"Expected {acq.n_receivers} receiver values, got shape {values.shape}",
                              field='values')
    grid = np.zeros(padded_shape(acq, pml_cells), dtype=np.complex128)
    # coincident receivers accumulate
    np.add.at(grid.ravel(), node_indices(acq.receivers, acq, pml_cells), values / acq.h ** 2)
    return Field(values=grid, pml_cells=pml_cells, h=acq.h)


def field_inner(a: Field, b: Field) -> complex:
    """Grid inner product h² Σ conj(a) b."""
    if a.shape != b.shape:
        raise ValidationError("Fields live on different grids", field='field')
    return complex(a.h ** 2 * np.vdot(a.values, b.values))


def source_terms(acq: Acquisition, frequency: float, pml_cells: int) -> np.ndarray:
    """Right-hand sides for every source at one frequency, shape (n_nodes, N_s).

    Each column is a Ricker-weighted point load ``amplitude * W(f) / h²``.
    """
    nzp, nxp = padded_shape(acq, pml_cells)
    weight = acq.amplitude * ricker_spectrum(acq.peak_frequency, frequency) / acq.h ** 2
    rhs = np.zeros((nzp * nxp, acq.n_sources), dtype=np.complex128)
    rhs[node_indices(acq.sources, acq, pml_cells), np.arange(acq.n_sources)] = weight
    return rhs
