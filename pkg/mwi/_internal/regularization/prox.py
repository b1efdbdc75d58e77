"""
Proximal Operators
==================

prox_{λR}(y) = argmin_x ½‖x - y‖² + λ R(x) for the three regularizers:

- none: R = 0.
- tikhonov: R = ‖∇x‖², solved as (I + 2λ ∇^t∇) x = y with the banded LU.
- tv: isotropic total variation, fast gradient projection on the dual.

Differences are forward differences with zero flux past the last row and
column.
"""

import logging
from typing import Dict, Type

import numpy as np
import scipy.sparse as sp

from ...core.config.system_config import SystemConfig
from ...core.exceptions import ValidationError
from ...core.interfaces import ProximalOperator
from ...core.models import Regularizer
from ..helmholtz.factorization import BandedLU, band_ordering

logger = logging.getLogger('mwi.Regularization')


def forward_gradient(image: np.ndarray):
    """(∂z, ∂x) forward differences; zero on the last row / column."""
    gz = np.zeros_like(image)
    gx = np.zeros_like(image)
    gz[:-1, :] = image[1:, :] - image[:-1, :]
    gx[:, :-1] = image[:, 1:] - image[:, :-1]
    return gz, gx


def divergence(pz: np.ndarray, px: np.ndarray) -> np.ndarray:
    """Negative adjoint of ``forward_gradient``."""
    out = np.zeros_like(pz)
    out[:-1, :] += pz[:-1, :]
    out[1:, :] -= pz[:-1, :]
    out[:, :-1] += px[:, :-1]
    out[:, 1:] -= px[:, :-1]
    return out


def neumann_laplacian(shape) -> sp.csr_matrix:
    """∇^t∇ for the zero-flux forward differences (graph Laplacian of the grid)."""
    nz, nx = shape
    dz = sp.diags([-np.ones(nz), np.ones(nz - 1)], [0, 1], shape=(nz, nz)).tolil()
    dx = sp.diags([-np.ones(nx), np.ones(nx - 1)], [0, 1], shape=(nx, nx)).tolil()
    dz[nz - 1, nz - 1] = 0.0
    dx[nx - 1, nx - 1] = 0.0
    lz = (dz.T @ dz).tocsr()
    lx = (dx.T @ dx).tocsr()
    return (sp.kron(lz, sp.identity(nx)) + sp.kron(sp.identity(nz), lx)).tocsr()


class IdentityProx(ProximalOperator):
    """R = 0."""

    def prox(self, image: np.ndarray, scale: float) -> np.ndarray:
        return image.copy()

    def value(self, image: np.ndarray) -> float:
        return 0.0


class TikhonovProx(ProximalOperator):
    """R = w ‖∇x‖²."""

    def __init__(self, weight: float):
        self.weight = weight

    def prox(self, image: np.ndarray, scale: float) -> np.ndarray:
        lam = scale * self.weight
        if lam == 0:
            return image.copy()
        matrix = sp.identity(image.size, format='csr') + 2.0 * lam * neumann_laplacian(image.shape)
        order, bandwidth = band_ordering(image.shape)
        factors = BandedLU.factor(matrix, order, bandwidth)
        return factors.solve(image.ravel()).reshape(image.shape)

    def value(self, image: np.ndarray) -> float:
        gz, gx = forward_gradient(image)
        return self.weight * float(np.sum(gz ** 2 + gx ** 2))


class TotalVariationProx(ProximalOperator):
    """R = w Σ √((∂x)² + (∂z)²).

    The prox is computed on the dual: min over |p| <= 1 per cell of
    ‖y + λ div p‖², by projected gradient steps of 1/(L λ) with Nesterov
    momentum (fast gradient projection) and adaptive restart. The primal
    iterate is x = y + λ div p.
    """

    def __init__(self, weight: float, max_iterations: int = SystemConfig.TV_INNER_ITERATIONS,
                 tolerance: float = SystemConfig.TV_TOLERANCE,
                 lipschitz: float = SystemConfig.TV_LIPSCHITZ):
        self.weight = weight
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.lipschitz = lipschitz

    def prox(self, image: np.ndarray, scale: float) -> np.ndarray:
        lam = scale * self.weight
        if lam == 0:
            return image.copy()

        step = 1.0 / (self.lipschitz * lam)
        # (rz, rx): extrapolated dual point; (pz, px): last projected iterate
        rz = np.zeros_like(image)
        rx = np.zeros_like(image)
        pz = np.zeros_like(image)
        px = np.zeros_like(image)
        t = 1.0
        x = image.copy()
        for iteration in range(self.max_iterations):
            gz, gx = forward_gradient(image + lam * divergence(rz, rx))
            qz = rz + step * gz
            qx = rx + step * gx
            norm = np.maximum(1.0, np.sqrt(qz ** 2 + qx ** 2))
            qz /= norm
            qx /= norm

            # restart the momentum once it points uphill
            if np.sum((rz - qz) * (qz - pz)) + np.sum((rx - qx) * (qx - px)) > 0:
                t = 1.0
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t ** 2))
            rz = qz + ((t - 1.0) / t_next) * (qz - pz)
            rx = qx + ((t - 1.0) / t_next) * (qx - px)
            pz, px, t = qz, qx, t_next

            x_next = image + lam * divergence(pz, px)
            change = np.linalg.norm(x_next - x) / max(np.linalg.norm(x), np.finfo(float).tiny)
            x = x_next
            if change < self.tolerance:
                logger.debug("TV prox converged", extra={'iterations': iteration + 1})
                break
        return x

    def value(self, image: np.ndarray) -> float:
        gz, gx = forward_gradient(image)
        return self.weight * float(np.sum(np.sqrt(gz ** 2 + gx ** 2)))


_KINDS: Dict[str, Type[ProximalOperator]] = {
    'none': IdentityProx,
    'tikhonov': TikhonovProx,
    'tv': TotalVariationProx,
}


def build_proximal_operator(reg: Regularizer) -> ProximalOperator:
    """Proximal operator for a regularizer configuration."""
    if reg.kind == 'none' or reg.effective_weight == 0:
        return IdentityProx()
    if reg.kind == 'tikhonov':
        return TikhonovProx(reg.weight)
    return _KINDS[reg.kind](reg.weight, max_iterations=reg.tv_inner_iters,
                            tolerance=reg.tv_tolerance)


def _check_image(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValidationError("Image must be a 2D grid", field='image')
    if not np.all(np.isfinite(image)):
        raise ValidationError("Image must be finite", field='image')
    return image


def apply_prox(reg: Regularizer, image: np.ndarray, scale: float) -> np.ndarray:
    """argmin_x ½‖x - image‖² + scale · weight · R(x)."""
    if not np.isfinite(scale) or scale <= 0:
        raise ValidationError(f"Prox scale must be positive, got {scale}", field='scale', value=scale)
    return build_proximal_operator(reg).prox(_check_image(image), float(scale))


def reg_value(reg: Regularizer, image: np.ndarray) -> float:
    """weight · R(image); 0 for kind none."""
    image = _check_image(image)
    if reg.kind == 'none':
        return 0.0
    return build_proximal_operator(reg).value(image) if reg.weight > 0 else 0.0
