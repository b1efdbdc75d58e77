"""
PML Helmholtz Operator
======================

Five-point discretization of A(m, ω)u = -ω² m u - ∇²u on the model grid
padded with a perfectly matched layer on all four sides.

Inside the layer derivatives are stretched, ∂x -> (1/s_x) ∂x with
s(x) = 1 + iσ(x)/ω and a quadratic σ profile. Rows are multiplied by
s_x s_z, which makes the assembled matrix complex symmetric:

    center = -ω² m s_x s_z + s_z (1/s_x[j-½] + 1/s_x[j+½]) / h²
                           + s_x (1/s_z[i-½] + 1/s_z[i+½]) / h²
    east   = -s_z / (s_x[j+½] h²)
    south  = -s_x / (s_z[i+½] h²)

Where σ = 0 this is the plain operator: center -ω²m + 4/h², neighbors -1/h².
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from ...core.config.system_config import SystemConfig
from ...core.exceptions import ValidationError
from ...core.models import Model

logger = logging.getLogger('mwi.HelmholtzOperator')


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Stencil coefficients of the padded operator at one angular frequency.

    ``east[i, j]`` couples nodes (i, j) and (i, j+1); ``south[i, j]`` couples
    (i, j) and (i+1, j). ``stretch`` is s_x s_z per node and ``pad_index``
    maps each padded node to the flat index of the interior cell whose value
    it carries.
    """
    omega: float
    h: float
    pml_cells: int
    center: np.ndarray
    east: np.ndarray
    south: np.ndarray
    stretch: np.ndarray
    pad_index: np.ndarray
    model_extremes: Tuple[float, float]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.center.shape

    @property
    def n_nodes(self) -> int:
        return self.center.size

    @property
    def frequency(self) -> float:
        return self.omega / (2.0 * math.pi)

    def matvec(self, u: np.ndarray) -> np.ndarray:
        """Apply the operator to a padded grid."""
        u = np.asarray(u).reshape(self.shape)
        out = self.center * u
        out[:, :-1] += self.east * u[:, 1:]
        out[:, 1:] += self.east * u[:, :-1]
        out[:-1, :] += self.south * u[1:, :]
        out[1:, :] += self.south * u[:-1, :]
        return out

    def to_sparse(self) -> sp.csr_matrix:
        """Matrix in natural ordering (node (i, j) -> i * nx_padded + j)."""
        nzp, nxp = self.shape
        index = np.arange(self.n_nodes).reshape(self.shape)
        west, east = index[:, :-1].ravel(), index[:, 1:].ravel()
        north, south = index[:-1, :].ravel(), index[1:, :].ravel()
        rows = np.concatenate([index.ravel(), west, east, north, south])
        cols = np.concatenate([index.ravel(), east, west, south, north])
        data = np.concatenate([
            self.center.ravel(),
            self.east.ravel(), self.east.ravel(),
            self.south.ravel(), self.south.ravel(),
        ])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_nodes, self.n_nodes))


def points_per_wavelength(velocity: float, frequency: float, h: float) -> float:
    return velocity / (frequency * h)


def padding_index(nz: int, nx: int, pml_cells: int) -> np.ndarray:
    """Flat interior index carried by every padded node (edge extension)."""
    return np.pad(np.arange(nz * nx).reshape(nz, nx), pml_cells, mode='edge')


def _stretch_profile(positions: np.ndarray, n_interior: int, pml_cells: int, h: float,
                     sigma_max: float, omega: float) -> np.ndarray:
    # positions are padded-grid coordinates in cells; interior spans [p, p + n - 1]
    p = pml_cells
    depth = np.maximum(np.maximum(p - positions, positions - (p + n_interior - 1)), 0.0) * h
    sigma = sigma_max * (depth / (p * h)) ** 2
    return 1.0 + 1j * sigma / omega


def assemble(model: Model, omega: float, pml_cells: int = SystemConfig.DEFAULT_PML_CELLS,
             reflection: float = SystemConfig.PML_REFLECTION) -> DiscreteOperator:
    """Assemble the PML Helmholtz operator for ``model`` at angular frequency ``omega``.

    ``reflection`` is the theoretical normal-incidence reflection of the
    layer; 1.0 switches the absorption off.
    """
    if not np.isfinite(omega) or omega <= 0:
        raise ValidationError(f"Angular frequency must be positive and finite, got {omega}",
                              field='omega', value=omega)
    if pml_cells < SystemConfig.MIN_PML_CELLS:
        raise ValidationError(f"PML width must be at least {SystemConfig.MIN_PML_CELLS} cells",
                              field='pml_cells', value=pml_cells)
    if not 0 < reflection <= 1:
        raise ValidationError("PML reflection coefficient must lie in (0, 1]",
                              field='reflection', value=reflection)

    frequency = omega / (2.0 * math.pi)
    ppw = points_per_wavelength(model.slowest_velocity(), frequency, model.h)
    if ppw < SystemConfig.MIN_POINTS_PER_WAVELENGTH:
        logger.warning(
            f"Dispersion guard: {ppw:.2f} points per wavelength at {frequency:.3f} Hz "
            f"(minimum {SystemConfig.MIN_POINTS_PER_WAVELENGTH})",
            extra={'frequency_hz': frequency, 'ppw': ppw},
        )

    p = pml_cells
    h = model.h
    m_pad = np.pad(model.m, p, mode='edge')
    nzp, nxp = m_pad.shape

    fastest = 1.0 / math.sqrt(float(model.m.min()))
    sigma_max = 3.0 * fastest * math.log(1.0 / reflection) / (2.0 * p * h)

    sx_node = _stretch_profile(np.arange(nxp, dtype=float), model.nx, p, h, sigma_max, omega)
    sz_node = _stretch_profile(np.arange(nzp, dtype=float), model.nz, p, h, sigma_max, omega)
    # half nodes: entry k sits at k - 1/2
    sx_half = _stretch_profile(np.arange(nxp + 1) - 0.5, model.nx, p, h, sigma_max, omega)
    sz_half = _stretch_profile(np.arange(nzp + 1) - 0.5, model.nz, p, h, sigma_max, omega)

    inv_h2 = 1.0 / h ** 2
    stretch = sz_node[:, None] * sx_node[None, :]
    center = (
        -omega ** 2 * m_pad * stretch
        + sz_node[:, None] * (1.0 / sx_half[:-1] + 1.0 / sx_half[1:])[None, :] * inv_h2
        + sx_node[None, :] * (1.0 / sz_half[:-1] + 1.0 / sz_half[1:])[:, None] * inv_h2
    )
    east = -sz_node[:, None] / sx_half[None, 1:-1] * inv_h2
    south = -sx_node[None, :] / sz_half[1:-1, None] * inv_h2

    return DiscreteOperator(
        omega=float(omega),
        h=h,
        pml_cells=p,
        center=center,
        east=east,
        south=south,
        stretch=stretch,
        pad_index=padding_index(model.nz, model.nx, p),
        model_extremes=(float(model.m.min()), float(model.m.max())),
    )
