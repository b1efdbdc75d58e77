"""
Model Builders
==============

Synthetic model generators, bound projection, grid resampling and model
error measures. Models are built in velocity and stored as squared
slowness.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..config.system_config import SystemConfig
from ..exceptions import ValidationError
from ..models import Bound, Model

logger = logging.getLogger('mwi.ModelBuilder')

RESAMPLE_FACTORS = (0.5, 2.0)


def grid_count(extent: float, h: float) -> int:
    """Number of grid points covering ``extent`` meters at spacing ``h``."""
    if not np.isfinite(h) or h <= 0:
        raise ValidationError(f"Grid spacing must be positive, got {h}", field='h', value=h)
    count = int(math.ceil(extent / h - 1e-9))
    if count < SystemConfig.MIN_GRID_POINTS:
        raise ValidationError(
            f"Grid spacing {h} m is too coarse for a {extent} m extent "
            f"(needs at least {SystemConfig.MIN_GRID_POINTS} points)",
            field='h', value=h,
        )
    return count


def _velocity_bounds(v_min: Optional[float], v_max: Optional[float]) -> Tuple[Optional[float], Optional[float]]:
    # the slowest velocity bounds squared slowness from above
    m_min = None if v_max is None else 1.0 / v_max ** 2
    m_max = None if v_min is None else 1.0 / v_min ** 2
    return m_min, m_max


def _from_velocity(velocity: np.ndarray, h: float, v_min: Optional[float] = None,
                   v_max: Optional[float] = None) -> Model:
    velocity = np.asarray(velocity, dtype=np.float64)
    v_lo = float(velocity.min()) if v_min is None else v_min
    v_hi = float(velocity.max()) if v_max is None else v_max
    m_min, m_max = _velocity_bounds(v_lo, v_hi)
    nz, nx = velocity.shape
    return Model(nx=nx, nz=nz, h=h, m=1.0 / velocity ** 2, m_min=m_min, m_max=m_max)


def make_homogeneous(nx: int, nz: int, h: float, v: float,
                     v_min: Optional[float] = None, v_max: Optional[float] = None) -> Model:
    """Constant-velocity model; bounds default to the single value ``1/v²``."""
    if not np.isfinite(v) or v <= 0:
        raise ValidationError(f"Velocity must be positive, got {v}", field='v', value=v)
    if nx < SystemConfig.MIN_GRID_POINTS or nz < SystemConfig.MIN_GRID_POINTS:
        raise ValidationError(f"Grid must be at least 3 x 3, got {nx} x {nz}", field='shape')
    if not np.isfinite(h) or h <= 0:
        raise ValidationError(f"Grid spacing must be positive, got {h}", field='h', value=h)
    return _from_velocity(np.full((nz, nx), float(v)), h, v_min, v_max)


def make_camembert(h: float, diameter_fraction: float = SystemConfig.CAMEMBERT_DIAMETER_FRACTION) -> Model:
    """Circular 4.6 km/s anomaly centered in a 4.0 km/s background.

    The disk diameter is ``diameter_fraction`` of the model width.
    """
    if not 0 < diameter_fraction <= 1:
        raise ValidationError("Disk diameter fraction must lie in (0, 1]",
                              field='diameter_fraction', value=diameter_fraction)
    nx = grid_count(SystemConfig.CAMEMBERT_WIDTH, h)
    nz = grid_count(SystemConfig.CAMEMBERT_DEPTH, h)

    x = np.arange(nx) * h
    z = np.arange(nz) * h
    xc, zc = x[-1] / 2.0, z[-1] / 2.0
    radius = diameter_fraction * SystemConfig.CAMEMBERT_WIDTH / 2.0
    inside = (x[None, :] - xc) ** 2 + (z[:, None] - zc) ** 2 <= radius ** 2

    velocity = np.where(inside, SystemConfig.CAMEMBERT_ANOMALY_VELOCITY,
                        SystemConfig.CAMEMBERT_BACKGROUND_VELOCITY)
    logger.debug("Built Camembert model", extra={'nx': nx, 'nz': nz, 'h': h})
    return _from_velocity(velocity, h)


def make_two_layer(h: float) -> Model:
    """0.6 km of 2.0 km/s over 0.9 km of 4.0 km/s."""
    nx = grid_count(SystemConfig.TWO_LAYER_WIDTH, h)
    nz = grid_count(SystemConfig.TWO_LAYER_DEPTH, h)

    depth = np.arange(nz) * h
    top = depth < SystemConfig.TWO_LAYER_TOP_THICKNESS
    velocity = np.where(top[:, None], SystemConfig.TWO_LAYER_TOP_VELOCITY,
                        SystemConfig.TWO_LAYER_BOTTOM_VELOCITY) * np.ones((1, nx))
    return _from_velocity(velocity, h)


def project_bounds(model: Model, values: Optional[np.ndarray] = None) -> Model:
    """Clamp squared slowness into [m_min, m_max] elementwise.

    With ``values`` the trial array is clamped into the bounds of ``model``
    instead of ``model.m``.
    """
    m = model.m if values is None else values
    return model.with_values(np.clip(m, model.m_min, model.m_max))


def _block_average(grid: np.ndarray) -> np.ndarray:
    nz, nx = grid.shape
    padded = np.pad(grid, ((0, nz % 2), (0, nx % 2)), mode='edge')
    return padded.reshape(padded.shape[0] // 2, 2, padded.shape[1] // 2, 2).mean(axis=(1, 3))


def _bilinear_refine(grid: np.ndarray, h: float) -> np.ndarray:
    nz, nx = grid.shape
    z = np.arange(nz) * h
    x = np.arange(nx) * h
    interpolator = RegularGridInterpolator((z, x), grid, method='linear')
    z_new = np.minimum(np.arange(2 * nz) * (h / 2.0), z[-1])
    x_new = np.minimum(np.arange(2 * nx) * (h / 2.0), x[-1])
    zz, xx = np.meshgrid(z_new, x_new, indexing='ij')
    points = np.stack([zz.ravel(), xx.ravel()], axis=-1)
    refined = interpolator(points).reshape(2 * nz, 2 * nx)
    # convex weights; clip rounding so the value range is preserved exactly
    return np.clip(refined, grid.min(), grid.max())


def resample_model(model: Model, factor: float) -> Model:
    """Coarsen (0.5, 2x2 block average) or refine (2.0, bilinear) a model.

    Spacing scales inversely to ``factor``; array bounds are resampled the
    same way as the model.
    """
    if factor not in RESAMPLE_FACTORS:
        raise ValidationError(f"Resample factor must be one of {RESAMPLE_FACTORS}, got {factor}",
                              field='factor', value=factor)

    if factor == 0.5:
        new_h = model.h * 2.0

        def transform(grid: np.ndarray) -> np.ndarray:
            return _block_average(grid)
    else:
        new_h = model.h / 2.0

        def transform(grid: np.ndarray) -> np.ndarray:
            return _bilinear_refine(grid, model.h)

    def transform_bound(bound: Bound) -> Bound:
        return bound if np.ndim(bound) == 0 else transform(np.asarray(bound))

    m = transform(model.m)
    nz, nx = m.shape
    if min(nz, nx) < SystemConfig.MIN_GRID_POINTS:
        raise ValidationError(f"Resampled grid {nx} x {nz} is below 3 x 3", field='factor', value=factor)
    return Model(nx=nx, nz=nz, h=new_h, m=m,
                 m_min=transform_bound(model.m_min), m_max=transform_bound(model.m_max))


def model_rmse(model: Model, truth: Model) -> float:
    """Velocity RMS error in m/s over the interior grid."""
    if not model.same_grid(truth):
        raise ValidationError("Model and truth grids differ", field='truth')
    return float(np.sqrt(np.mean((model.velocity - truth.velocity) ** 2)))


def slowness_rmse(model: Model, truth: Model) -> float:
    """Squared-slowness RMS error in s²/m² over the interior grid."""
    if not model.same_grid(truth):
        raise ValidationError("Model and truth grids differ", field='truth')
    return float(np.sqrt(np.mean((model.m - truth.m) ** 2)))
