"""
MWI Core Domain Models
======================

Immutable data structures shared by the Helmholtz engine, the sensitivity
operators and the inversion loop. Grids are numpy arrays indexed
``[iz, ix]`` (row-major, shallow to deep); arrays held by the frozen
dataclasses are private read-only copies.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

Bound = Union[float, np.ndarray]
Position = Tuple[int, int]

REGULARIZER_KINDS = ('none', 'tikhonov', 'tv')


def _frozen_array(values: Any, dtype: Any) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Model:
    """Rectangular grid of squared slowness (s²/m²) with box bounds."""
    nx: int
    nz: int
    h: float
    m: np.ndarray
    m_min: Optional[Bound] = None
    m_max: Optional[Bound] = None

    def __post_init__(self):
        if not isinstance(self.nx, (int, np.integer)) or not isinstance(self.nz, (int, np.integer)):
            raise ValueError("Grid dimensions must be integers")
        if self.nx < 3 or self.nz < 3:
            raise ValueError(f"Grid must be at least 3 x 3, got {self.nx} x {self.nz}")
        if not np.isfinite(self.h) or self.h <= 0:
            raise ValueError(f"Grid spacing must be positive, got {self.h}")

        m = _frozen_array(self.m, np.float64)
        if m.shape != (self.nz, self.nx):
            raise ValueError(f"Model array has shape {m.shape}, expected {(self.nz, self.nx)}")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise ValueError("Squared slowness must be strictly positive and finite")

        object.__setattr__(self, 'nx', int(self.nx))
        object.__setattr__(self, 'nz', int(self.nz))
        object.__setattr__(self, 'h', float(self.h))
        object.__setattr__(self, 'm', m)
        object.__setattr__(self, 'm_min', self._normalize_bound(self.m_min, float(m.min())))
        object.__setattr__(self, 'm_max', self._normalize_bound(self.m_max, float(m.max())))

        if np.any(np.asarray(self.m_min) > np.asarray(self.m_max)):
            raise ValueError("Lower bound exceeds upper bound")

    def _normalize_bound(self, bound: Optional[Bound], default: float) -> Bound:
        if bound is None:
            return default
        if np.ndim(bound) == 0:
            value = float(bound)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"Bounds must be positive and finite, got {value}")
            return value
        array = _frozen_array(bound, np.float64)
        if array.shape != (self.nz, self.nx):
            raise ValueError(f"Bound array has shape {array.shape}, expected {(self.nz, self.nx)}")
        if not np.all(np.isfinite(array)) or np.any(array <= 0):
            raise ValueError("Bounds must be positive and finite")
        return array

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nz, self.nx)

    @property
    def velocity(self) -> np.ndarray:
        """Velocity in m/s."""
        return 1.0 / np.sqrt(self.m)

    @property
    def extent(self) -> Tuple[float, float]:
        """Physical (width, depth) in meters spanned by the grid nodes."""
        return ((self.nx - 1) * self.h, (self.nz - 1) * self.h)

    def bound_range(self) -> float:
        """Largest m_max - m_min over the grid."""
        return float(np.max(np.asarray(self.m_max) - np.asarray(self.m_min)))

    def slowest_velocity(self) -> float:
        """Slowest velocity admitted by the bounds (largest squared slowness)."""
        return float(1.0 / np.sqrt(np.max(np.maximum(self.m_max, self.m.max()))))

    def with_values(self, m: np.ndarray) -> 'Model':
        """Same grid and bounds, new squared slowness."""
        return replace(self, m=m)

    def with_bounds(self, m_min: Optional[Bound], m_max: Optional[Bound]) -> 'Model':
        return replace(self, m_min=m_min, m_max=m_max)

    def same_grid(self, other: 'Model') -> bool:
        return (self.nx, self.nz) == (other.nx, other.nz) and self.h == other.h


@dataclass(frozen=True)
class Acquisition:
    """Source and receiver nodes on the interior grid, wavelet and frequency set.

    Positions are ``(iz, ix)`` node indices. ``amplitude`` scales every
    source term.
    """
    nx: int
    nz: int
    h: float
    sources: Tuple[Position, ...]
    receivers: Tuple[Position, ...]
    peak_frequency: float
    frequencies: Tuple[float, ...]
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'sources', self._normalize_positions(self.sources, 'source'))
        object.__setattr__(self, 'receivers', self._normalize_positions(self.receivers, 'receiver'))
        object.__setattr__(self, 'frequencies', tuple(float(f) for f in self.frequencies))

        if not self.frequencies:
            raise ValueError("At least one frequency is required")
        if any(not np.isfinite(f) or f <= 0 for f in self.frequencies):
            raise ValueError("Frequencies must be positive")
        if len(set(self.frequencies)) != len(self.frequencies):
            raise ValueError("Frequencies must be distinct")
        if not np.isfinite(self.peak_frequency) or self.peak_frequency <= 0:
            raise ValueError(f"Peak frequency must be positive, got {self.peak_frequency}")
        if not np.isfinite(self.amplitude) or self.amplitude == 0:
            raise ValueError("Source amplitude must be finite and nonzero")
        if self.h <= 0:
            raise ValueError("Grid spacing must be positive")

    def _normalize_positions(self, positions: Iterable[Sequence[int]], kind: str) -> Tuple[Position, ...]:
        normalized = tuple((int(iz), int(ix)) for iz, ix in positions)
        if not normalized:
            raise ValueError(f"At least one {kind} is required")
        for iz, ix in normalized:
            if not (0 <= iz < self.nz and 0 <= ix < self.nx):
                raise ValueError(
                    f"{kind.capitalize()} position ({iz}, {ix}) lies outside the "
                    f"{self.nz} x {self.nx} interior grid"
                )
        return normalized

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_receivers(self) -> int:
        return len(self.receivers)

    @property
    def n_frequencies(self) -> int:
        return len(self.frequencies)

    @property
    def data_shape(self) -> Tuple[int, int, int]:
        return (self.n_sources, self.n_frequencies, self.n_receivers)

    def matches(self, model: Model) -> bool:
        return (self.nx, self.nz) == (model.nx, model.nz) and self.h == model.h

    def with_frequencies(self, frequencies: Sequence[float]) -> 'Acquisition':
        """Restrict to a subset of the active frequencies (order as given)."""
        missing = [f for f in frequencies if float(f) not in self.frequencies]
        if missing:
            raise ValueError(f"Frequencies {missing} are not in the acquisition")
        return replace(self, frequencies=tuple(float(f) for f in frequencies))

    def with_amplitude(self, amplitude: float) -> 'Acquisition':
        return replace(self, amplitude=amplitude)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex wavefield on the padded grid for one (source, frequency)."""
    values: np.ndarray
    pml_cells: int
    h: float

    def __post_init__(self):
        values = _frozen_array(self.values, np.complex128)
        if values.ndim != 2:
            raise ValueError("Field values must be a 2D grid")
        if not np.all(np.isfinite(values)):
            raise ValueError("Field values must be finite")
        if self.pml_cells < 0 or min(values.shape) <= 2 * self.pml_cells:
            raise ValueError("Field grid is smaller than its PML padding")
        object.__setattr__(self, 'values', values)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def interior(self) -> np.ndarray:
        p = self.pml_cells
        return self.values[p:self.values.shape[0] - p, p:self.values.shape[1] - p]


@dataclass(frozen=True, eq=False)
class ShotData:
    """Complex data cube indexed (source, frequency, receiver)."""
    values: np.ndarray
    frequencies: Tuple[float, ...]
    wavelet_applied: bool = True

    def __post_init__(self):
        values = _frozen_array(self.values, np.complex128)
        object.__setattr__(self, 'frequencies', tuple(float(f) for f in self.frequencies))
        if values.ndim != 3:
            raise ValueError(f"Shot data must be a 3D cube, got {values.ndim} dimensions")
        if values.shape[1] != len(self.frequencies):
            raise ValueError(
                f"Shot data holds {values.shape[1]} frequencies, "
                f"{len(self.frequencies)} labels given"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Shot data must be finite")
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, acq: Acquisition) -> 'ShotData':
        return cls(np.zeros(acq.data_shape, dtype=np.complex128), acq.frequencies)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.values.shape

    def matches(self, acq: Acquisition) -> bool:
        return self.shape == acq.data_shape and self.frequencies == acq.frequencies

    def _check_compatible(self, other: 'ShotData') -> None:
        if self.shape != other.shape or self.frequencies != other.frequencies:
            raise ValueError("Shot data cubes do not share shape and frequencies")

    def __add__(self, other: 'ShotData') -> 'ShotData':
        self._check_compatible(other)
        return ShotData(self.values + other.values, self.frequencies, self.wavelet_applied)

    def __sub__(self, other: 'ShotData') -> 'ShotData':
        self._check_compatible(other)
        return ShotData(self.values - other.values, self.frequencies, self.wavelet_applied)

    def __mul__(self, scale: complex) -> 'ShotData':
        return ShotData(self.values * scale, self.frequencies, self.wavelet_applied)

    __rmul__ = __mul__

    def __neg__(self) -> 'ShotData':
        return ShotData(-self.values, self.frequencies, self.wavelet_applied)

    def half_norm_squared(self) -> float:
        """½‖d‖² summed over sources, frequencies and receivers."""
        return 0.5 * float(np.vdot(self.values, self.values).real)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values.ravel()))

    def select_frequencies(self, frequencies: Sequence[float]) -> 'ShotData':
        """Sub-cube for the given frequencies (order as given)."""
        try:
            index = [self.frequencies.index(float(f)) for f in frequencies]
        except ValueError:
            raise ValueError(f"Frequencies {list(frequencies)} are not all present in the data")
        return ShotData(self.values[:, index, :], tuple(float(f) for f in frequencies),
                        self.wavelet_applied)


@dataclass(frozen=True, eq=False)
class GradientBundle:
    """Misfit value, interior gradient and optional pseudo-Hessian diagonal."""
    misfit: float
    gradient: np.ndarray
    hessian_diag: Optional[np.ndarray] = None
    predicted: Optional[ShotData] = None

    def __post_init__(self):
        if not np.isfinite(self.misfit) or self.misfit < 0:
            raise ValueError(f"Misfit must be finite and non-negative, got {self.misfit}")
        if not np.all(np.isfinite(self.gradient)):
            raise ValueError("Gradient must be finite")

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.gradient))


@dataclass(frozen=True)
class Regularizer:
    """Regularization choice: kind, weight and the TV inner iteration cap."""
    kind: str = 'none'
    weight: float = 0.0
    tv_inner_iters: int = 50
    tv_tolerance: float = 1e-6

    def __post_init__(self):
        if self.kind not in REGULARIZER_KINDS:
            raise ValueError(f"Regularizer kind must be one of {REGULARIZER_KINDS}, got '{self.kind}'")
        if not np.isfinite(self.weight) or self.weight < 0:
            raise ValueError(f"Regularizer weight must be finite and non-negative, got {self.weight}")
        if not isinstance(self.tv_inner_iters, int) or self.tv_inner_iters < 1:
            raise ValueError("tv_inner_iters must be a positive integer")
        if not self.tv_tolerance > 0:
            raise ValueError("tv_tolerance must be positive")

    @property
    def effective_weight(self) -> float:
        return 0.0 if self.kind == 'none' else float(self.weight)


@dataclass(frozen=True)
class IterationRecord:
    """One row of the convergence log.

    Misfits and gradient norm are measured at the iterate the gradient was
    taken at; ``model_rmse`` is the error of the iterate produced by the step.
    """
    iteration: int
    e_true: float
    e_multiplier: float
    grad_norm: float
    model_rmse: Optional[float] = None


@dataclass
class InversionState:
    """Single-owner mutable state of one inversion run."""
    model: Model
    multipliers: ShotData
    k: int = 0
    alpha: Optional[float] = None
    log: List[IterationRecord] = field(default_factory=list)
    lagrange: Optional[ShotData] = None

    def snapshot(self) -> 'InversionState':
        """Detached copy; models and data are immutable so only the log is copied."""
        return InversionState(model=self.model, multipliers=self.multipliers, k=self.k,
                              alpha=self.alpha, log=list(self.log), lagrange=self.lagrange)
