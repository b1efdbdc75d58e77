"""
Acquisition Builders
====================

Equally spaced source and receiver lines along a model side, the default
Ricker frequency band and the dispersion guard.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.system_config import SystemConfig
from ..exceptions import ConfigurationError, ValidationError
from ..models import Acquisition, Model, Position

logger = logging.getLogger('mwi.AcquisitionBuilder')

SIDES = ('top', 'bottom', 'left', 'right')


def line_positions(count: int, length: int) -> List[int]:
    """Cell-centered, equally spaced indices of ``count`` points on ``length`` nodes."""
    if count < 1:
        raise ValidationError(f"Point count must be positive, got {count}", field='count', value=count)
    centers = (np.arange(count) + 0.5) * length / count - 0.5
    return [int(i) for i in np.clip(np.rint(centers), 0, length - 1)]


def side_positions(model: Model, count: int, side: str,
                   standoff: int = SystemConfig.DEFAULT_STANDOFF_CELLS) -> Tuple[Position, ...]:
    """``count`` positions along ``side``, ``standoff`` cells in from the edge."""
    if side not in SIDES:
        raise ValidationError(f"Side must be one of {SIDES}, got '{side}'", field='side', value=side)
    across = model.nz if side in ('top', 'bottom') else model.nx
    if not 0 <= standoff < across:
        raise ValidationError(f"Standoff {standoff} lies outside the grid", field='standoff', value=standoff)

    if side == 'top':
        return tuple((standoff, ix) for ix in line_positions(count, model.nx))
    if side == 'bottom':
        return tuple((model.nz - 1 - standoff, ix) for ix in line_positions(count, model.nx))
    if side == 'left':
        return tuple((iz, standoff) for iz in line_positions(count, model.nz))
    return tuple((iz, model.nx - 1 - standoff) for iz in line_positions(count, model.nz))


def dispersion_limit(v_min: float, h: float) -> float:
    """Highest frequency resolved with the minimum points per wavelength."""
    return v_min / (SystemConfig.MIN_POINTS_PER_WAVELENGTH * h)


def ricker_band(f_p: float, count: int = SystemConfig.DEFAULT_FREQUENCY_COUNT,
                v_min: Optional[float] = None, h: Optional[float] = None) -> Tuple[float, ...]:
    """``count`` equally spaced frequencies over 0.4·f_p .. 1.6·f_p.

    With ``v_min`` and ``h`` the upper end is capped at the dispersion limit.
    """
    if not np.isfinite(f_p) or f_p <= 0:
        raise ValidationError(f"Peak frequency must be positive, got {f_p}", field='f_p', value=f_p)
    if count < 1:
        raise ValidationError(f"Frequency count must be positive, got {count}", field='count', value=count)

    low = SystemConfig.BAND_LOW_FRACTION * f_p
    high = SystemConfig.BAND_HIGH_FRACTION * f_p
    if v_min is not None and h is not None:
        cap = dispersion_limit(v_min, h)
        if cap < low:
            raise ConfigurationError(
                f"Grid spacing {h} m cannot resolve the {f_p} Hz band "
                f"(dispersion limit {cap:.3f} Hz)",
                config_key='frequencies', config_value=f_p,
            )
        # stay inside the guard despite round-off in ppw
        high = min(high, cap * (1.0 - 1e-9))
    if count == 1:
        return (float(min(f_p, high)),)
    return tuple(float(f) for f in np.linspace(low, high, count))


def check_dispersion(model: Model, acq: Acquisition, strict: bool = True) -> float:
    """Points per wavelength at the highest active frequency in the slowest admissible medium.

    Raises:
        ConfigurationError: If ``strict`` and the count is below the minimum;
            otherwise the violation is logged.
    """
    ppw = model.slowest_velocity() / (max(acq.frequencies) * model.h)
    if ppw < SystemConfig.MIN_POINTS_PER_WAVELENGTH * (1.0 - 1e-9):
        message = (f"Dispersion guard: {ppw:.2f} points per wavelength at "
                   f"{max(acq.frequencies):.3f} Hz (minimum {SystemConfig.MIN_POINTS_PER_WAVELENGTH})")
        if strict:
            raise ConfigurationError(message, config_key='frequencies', config_value=max(acq.frequencies))
        logger.warning(message, extra={'ppw': ppw})
    return ppw


def build_acquisition(model: Model, n_sources: int, source_side: str, n_receivers: int,
                      receiver_side: str, f_p: float,
                      standoff: int = SystemConfig.DEFAULT_STANDOFF_CELLS,
                      frequencies: Optional[Sequence[float]] = None,
                      amplitude: float = 1.0) -> Acquisition:
    """Source and receiver lines on two model sides.

    Without explicit ``frequencies`` the default Ricker band is used, capped
    by the slowest admissible velocity of ``model``.
    """
    if frequencies is None:
        frequencies = ricker_band(f_p, v_min=model.slowest_velocity(), h=model.h)
    try:
        acq = Acquisition(
            nx=model.nx, nz=model.nz, h=model.h,
            sources=side_positions(model, n_sources, source_side, standoff),
            receivers=side_positions(model, n_receivers, receiver_side, standoff),
            peak_frequency=f_p,
            frequencies=tuple(frequencies),
            amplitude=amplitude,
        )
    except ValueError as e:
        raise ValidationError(f"Invalid acquisition: {e}", field='acquisition')
    logger.debug("Built acquisition", extra={'sources': acq.n_sources, 'receivers': acq.n_receivers,
                                             'frequencies': acq.frequencies})
    return acq
