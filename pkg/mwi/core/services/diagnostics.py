"""
Diagnostic Harnesses
====================

Self-checks shared by the command line and the test suite:

- ``gradient_check``: adjoint-state gradient against central finite
  differences on a small random model.
- ``equivalence_check``: scaled (effective data) and unscaled (Lagrange
  multiplier) iterations on a toy problem.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..config.run_config import RunConfig
from ..engine import run_inversion, unscaled_al_iteration
from ..exceptions import ValidationError
from ..models import Acquisition, InversionState, Model
from .model_builder import make_homogeneous
from ..._internal.sensitivity import Simulator, forward_map, misfit_and_gradient

logger = logging.getLogger('mwi.Diagnostics')

GRADIENT_TOLERANCE = 1e-4
EQUIVALENCE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GradientCheckResult:
    cells: Tuple[Tuple[int, int], ...]
    adjoint: Tuple[float, ...]
    finite_difference: Tuple[float, ...]
    relative_errors: Tuple[float, ...]
    tolerance: float

    @property
    def max_relative_error(self) -> float:
        return max(self.relative_errors)

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance


@dataclass(frozen=True)
class EquivalenceResult:
    model_differences: Tuple[float, ...]
    multiplier_differences: Tuple[float, ...]
    tolerance: float

    @property
    def max_model_difference(self) -> float:
        return max(self.model_differences, default=0.0)

    @property
    def max_multiplier_difference(self) -> float:
        return max(self.multiplier_differences, default=0.0)

    @property
    def passed(self) -> bool:
        return max(self.max_model_difference, self.max_multiplier_difference) <= self.tolerance


def _line_acquisition(model: Model, n_sources: int, frequencies: Tuple[float, ...]) -> Acquisition:
    """Sources on row 2, receivers on every column of the third row from the bottom."""
    sources = [(2, int(ix)) for ix in np.linspace(2, model.nx - 3, n_sources).round()]
    receivers = [(model.nz - 3, ix) for ix in range(model.nx)]
    return Acquisition(nx=model.nx, nz=model.nz, h=model.h, sources=tuple(sources),
                       receivers=tuple(receivers), peak_frequency=float(np.median(frequencies)),
                       frequencies=frequencies)


def gradient_check(nx: int = 20, nz: int = 20, n_cells: int = 20, relative_step: float = 1e-4,
                   seed: int = 0, tolerance: float = GRADIENT_TOLERANCE) -> GradientCheckResult:
    """Compare the adjoint gradient with central differences on random interior cells.

    Model: h = 10 m, velocities uniform in 1800..2200 m/s; 2 sources, 8/10/12 Hz.
    Observed data come from the homogeneous 2000 m/s model. Errors are
    relative to max(|fd|, |g|, 1e-6 max|g|).
    """
    if nx < 8 or nz < 8:
        raise ValidationError("Gradient check needs at least an 8 x 8 grid", field='grid')
    rng = np.random.default_rng(seed)
    h = 10.0
    velocity = rng.uniform(1800.0, 2200.0, size=(nz, nx))
    model = Model(nx=nx, nz=nz, h=h, m=1.0 / velocity ** 2)
    acq = _line_acquisition(model, 2, (8.0, 10.0, 12.0))
    observed = forward_map(make_homogeneous(nx, nz, h, 2000.0), acq)

    bundle = misfit_and_gradient(model, acq, observed, Simulator(model, acq))
    gradient = bundle.gradient
    floor = 1e-6 * float(np.max(np.abs(gradient)))

    rows = np.arange(nz // 4, nz - nz // 4)
    # the PML strength follows the fastest cell, so the misfit has a kink there
    fastest = np.unravel_index(np.argmin(model.m), model.shape)
    candidates = [(int(iz), int(ix)) for iz in rows for ix in range(nx) if (iz, ix) != fastest]
    picks = rng.choice(len(candidates), size=min(n_cells, len(candidates)), replace=False)
    cells = tuple(candidates[i] for i in sorted(picks))

    def misfit(m: np.ndarray) -> float:
        return (forward_map(model.with_values(m), acq) - observed).half_norm_squared()

    adjoint: List[float] = []
    finite: List[float] = []
    errors: List[float] = []
    for iz, ix in cells:
        step = relative_step * model.m[iz, ix]
        plus = model.m.copy()
        minus = model.m.copy()
        plus[iz, ix] += step
        minus[iz, ix] -= step
        fd = (misfit(plus) - misfit(minus)) / (2.0 * step)
        g = float(gradient[iz, ix])
        adjoint.append(g)
        finite.append(fd)
        errors.append(abs(fd - g) / max(abs(fd), abs(g), floor))

    result = GradientCheckResult(cells=cells, adjoint=tuple(adjoint), finite_difference=tuple(finite),
                                 relative_errors=tuple(errors), tolerance=tolerance)
    logger.info(f"Gradient check: max relative error {result.max_relative_error:.3e}",
                extra={'cells': len(cells)})
    return result


def equivalence_check(n: int = 16, iterations: int = 5, mu: float = 2.0,
                      tolerance: float = EQUIVALENCE_TOLERANCE) -> EquivalenceResult:
    """Run the scaled and unscaled loops side by side on an n x n toy problem.

    Model differences are ‖m_scaled - m_unscaled‖ / ‖m_scaled‖ per iterate;
    multiplier differences are ‖μ(d_k - d*) - λ_k‖ / ‖λ_k‖.
    """
    h = 10.0
    velocity = np.full((n, n), 2000.0)
    velocity[n // 3:2 * n // 3, n // 3:2 * n // 3] = 2200.0
    truth = Model(nx=n, nz=n, h=h, m=1.0 / velocity ** 2)
    initial = make_homogeneous(n, n, h, 2000.0, v_min=1800.0, v_max=2400.0)
    acq = _line_acquisition(truth, 2, (8.0, 10.0))
    observed = forward_map(truth, acq)
    cfg = RunConfig(method='mwi', mu=mu, iterations=iterations)

    scaled: List[InversionState] = []
    unscaled: List[InversionState] = []
    run_inversion(cfg, acq, observed, initial, on_iteration=lambda s: scaled.append(s.snapshot()))
    unscaled_al_iteration(cfg, acq, observed, initial,
                          on_iteration=lambda s: unscaled.append(s.snapshot()))

    model_diffs: List[float] = []
    multiplier_diffs: List[float] = []
    for a, b in zip(scaled, unscaled):
        model_diffs.append(float(np.linalg.norm(a.model.m - b.model.m) / np.linalg.norm(a.model.m)))
        implied = mu * (a.multipliers - observed).values
        scale = max(float(np.linalg.norm(b.lagrange.values)), np.finfo(float).tiny)
        multiplier_diffs.append(float(np.linalg.norm(implied - b.lagrange.values) / scale))

    result = EquivalenceResult(model_differences=tuple(model_diffs),
                               multiplier_differences=tuple(multiplier_diffs), tolerance=tolerance)
    logger.info(f"Equivalence check: model {result.max_model_difference:.3e}, "
                f"multipliers {result.max_multiplier_difference:.3e}")
    return result
