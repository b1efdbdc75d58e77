"""
Inversion Engine
================

Penalty FWI and multipliers waveform inversion (MWI) as one diagonalized
loop. Each outer iteration takes a single preconditioned proximal-gradient
step on

    μ/2 ‖S(m) b* - d_k‖² + R(m)

and, for MWI only, updates the effective data

    d_{k+1} = d_k + d* - S(m_{k+1}) b*

so d_k is the observed data minus the running sum of residuals. FWI keeps
d_k = d*. The unscaled form carries Lagrange multipliers
λ_k = μ (d_k - d*) instead and exists as an oracle for the scaled loop.
"""

import logging
from dataclasses import replace
from typing import Callable, List, NoReturn, Optional, Sequence, Tuple

import numpy as np

from .config.run_config import RunConfig
from .config.system_config import SystemConfig
from .exceptions import (
    ConfigurationError, InversionAborted, NumericalError, SolverError, ValidationError,
)
from .models import Acquisition, InversionState, IterationRecord, Model, ShotData
from .services.acquisition_builder import check_dispersion
from .services.model_builder import model_rmse, project_bounds
from .._internal.regularization import apply_prox
from .._internal.sensitivity import Simulator, build_direction_strategy
from .._internal.storage import write_checkpoint

IterationCallback = Callable[[InversionState], None]


class InversionEngine:
    """Outer loop of one run over a fixed acquisition and observed data set.

    Holds one cached simulator: the forward solve of m_{k+1} done for the
    multiplier update is reused by the next model step.
    """

    def __init__(self, cfg: RunConfig, acq: Acquisition, observed: ShotData,
                 reflection: float = SystemConfig.PML_REFLECTION):
        self.logger = logging.getLogger('mwi.InversionEngine')

        if cfg.frequencies is not None:
            try:
                acq = acq.with_frequencies(cfg.frequencies)
            except ValueError as e:
                raise ConfigurationError(str(e), config_key='frequencies',
                                         config_value=cfg.frequencies)
        self.cfg = cfg
        self.acq = acq
        self.observed = self._restrict(observed, 'observed')
        self.reflection = reflection
        self._strategy = build_direction_strategy(cfg)
        self._simulator: Optional[Simulator] = None

    def _restrict(self, data: ShotData, name: str) -> ShotData:
        if data.frequencies != self.acq.frequencies:
            try:
                data = data.select_frequencies(self.acq.frequencies)
            except ValueError as e:
                raise ValidationError(f"{name} data lacks active frequencies: {e}", field=name)
        if not data.matches(self.acq):
            raise ValidationError(
                f"{name} data has shape {data.shape}, acquisition expects {self.acq.data_shape}",
                field=name,
            )
        return data

    def simulator(self, model: Model) -> Simulator:
        """Simulator for ``model``, reused while the same model object is current."""
        if self._simulator is None or self._simulator.model is not model:
            self._simulator = Simulator(model, self.acq, self.cfg.pml_cells, self.reflection)
        return self._simulator

    def initial_state(self, initial: Model) -> InversionState:
        if not self.acq.matches(initial):
            raise ValidationError("Initial model grid does not match the acquisition", field='initial')
        return InversionState(model=initial, multipliers=self.observed, alpha=self.cfg.step_length)

    # -- one step ------------------------------------------------------------

    def _direction(self, model: Model, residual: ShotData) -> Tuple[np.ndarray, np.ndarray]:
        sim = self.simulator(model)
        gradient = self._strategy.residual_gradient(model, self.acq, residual, sim)
        diagonal = self._strategy.preconditioner(model, self.acq, sim)
        direction = gradient if diagonal is None else gradient / diagonal
        return gradient, direction

    def _fix_step_length(self, state: InversionState, direction: np.ndarray) -> bool:
        """Set alpha once from the first nonzero direction; False if the direction is zero."""
        if state.alpha is not None:
            return True
        peak = float(np.max(np.abs(direction)))
        if peak == 0:
            return False
        span = state.model.bound_range()
        if not span > 0:
            raise ConfigurationError(
                "Step length rule needs m_max > m_min somewhere; set bounds or step_length",
                config_key='step_length',
            )
        state.alpha = self.cfg.step_fraction * span / peak
        self.logger.info(f"Fixed step length {state.alpha:.6e}",
                         extra={'alpha': state.alpha, 'iteration': state.k})
        return True

    def _update(self, state: InversionState, direction: np.ndarray) -> Model:
        if not self._fix_step_length(state, direction):
            return state.model

        trial = apply_prox(self.cfg.regularizer, state.model.m - state.alpha * direction, state.alpha)
        finite = bool(np.all(np.isfinite(trial)))
        if finite and self.cfg.bounds:
            return project_bounds(state.model, trial)
        if not finite or np.any(trial <= 0):
            raise NumericalError(
                "Model update left the positive squared-slowness range",
                context={'iteration': state.k, 'alpha': state.alpha,
                         'min': float(np.nanmin(trial))},
            )
        return state.model.with_values(trial)

    def _gradient_step(self, state: InversionState, residual: ShotData) -> Tuple[Model, float]:
        gradient, direction = self._direction(state.model, residual)
        return self._update(state, direction), float(np.linalg.norm(gradient))

    def model_step(self, state: InversionState) -> Model:
        """m_{k+1} from one preconditioned proximal-gradient step against d_k."""
        target = self._restrict(state.multipliers, 'multipliers')
        predicted = self.simulator(state.model).data()
        model, _ = self._gradient_step(state, self.cfg.mu * (predicted - target))
        return model

    def multiplier_step(self, state: InversionState, model_next: Model) -> ShotData:
        """d_k + d* - S(m_{k+1}) b*."""
        multipliers = self._restrict(state.multipliers, 'multipliers')
        return multipliers + (self.observed - self.simulator(model_next).data())

    # -- loops ---------------------------------------------------------------

    def _abort(self, state: InversionState, error: SolverError) -> NoReturn:
        checkpoint = None
        if self.cfg.checkpoint_dir is not None:
            try:
                checkpoint = str(write_checkpoint(self.cfg.checkpoint_dir, state,
                                                  self.cfg.mu, self.cfg.method))
            except OSError as e:
                self.logger.error(f"Checkpoint write failed: {e}")
        raise InversionAborted(
            f"Inversion aborted at iteration {state.k}: {error.message}",
            iteration=state.k, state=state.snapshot(), checkpoint=checkpoint, cause=error,
        ) from error

    def _record(self, state: InversionState, predicted: ShotData, grad_norm: float,
                model_next: Model) -> IterationRecord:
        rmse = None if self.cfg.truth is None else model_rmse(model_next, self.cfg.truth)
        record = IterationRecord(
            iteration=state.k + 1,
            e_true=(predicted - self.observed).half_norm_squared(),
            e_multiplier=(predicted - state.multipliers).half_norm_squared(),
            grad_norm=grad_norm,
            model_rmse=rmse,
        )
        self.logger.info(
            f"Iteration {record.iteration}: E_true={record.e_true:.6e}",
            extra={'iteration': record.iteration, 'e_true': record.e_true,
                   'e_multiplier': record.e_multiplier, 'grad_norm': record.grad_norm},
        )
        return record

    def iterate(self, state: InversionState) -> None:
        """One outer iteration, in place."""
        try:
            predicted = self.simulator(state.model).data()
            residual = self.cfg.mu * (predicted - state.multipliers)
            model_next, grad_norm = self._gradient_step(state, residual)
            multipliers = (self.multiplier_step(state, model_next) if self.cfg.is_mwi
                           else state.multipliers)
        except SolverError as e:
            self._abort(state, e)

        state.log.append(self._record(state, predicted, grad_norm, model_next))
        state.model = model_next
        state.multipliers = multipliers
        state.k += 1

    def _check_start(self, initial: Model, first_iteration: int = 0) -> InversionState:
        check_dispersion(initial, self.acq, strict=True)
        state = self.initial_state(initial)
        state.k = first_iteration
        self.logger.info(
            f"Starting {self.cfg.method} run",
            extra={'iterations': self.cfg.iterations, 'mu': self.cfg.mu,
                   'frequencies': self.acq.frequencies},
        )
        return state

    def run(self, initial: Model, on_iteration: Optional[IterationCallback] = None,
            first_iteration: int = 0) -> InversionState:
        """``cfg.iterations`` outer iterations from ``initial``.

        Iterations are counted from ``first_iteration``, so a continuation
        stage carries on the numbering of the stages before it.
        """
        state = self._check_start(initial, first_iteration)
        for _ in range(self.cfg.iterations):
            self.iterate(state)
            if on_iteration is not None:
                on_iteration(state)
        return state

    def run_unscaled(self, initial: Model,
                     on_iteration: Optional[IterationCallback] = None) -> InversionState:
        """λ-form iteration: one gradient step on the augmented Lagrangian, then
        λ_{k+1} = λ_k - μ (S(m_{k+1}) b* - d*). ``state.multipliers`` reports
        d* + λ_k/μ.
        """
        if not self.cfg.is_mwi:
            raise ConfigurationError("The unscaled iteration is defined for method 'mwi' only",
                                     config_key='method', config_value=self.cfg.method)
        state = self._check_start(initial)
        mu = self.cfg.mu
        state.lagrange = ShotData.zeros(self.acq)

        for _ in range(self.cfg.iterations):
            try:
                predicted = self.simulator(state.model).data()
                residual = mu * (predicted - self.observed) - state.lagrange
                model_next, grad_norm = self._gradient_step(state, residual)
                predicted_next = self.simulator(model_next).data()
            except SolverError as e:
                self._abort(state, e)

            state.log.append(self._record(state, predicted, grad_norm, model_next))
            state.lagrange = state.lagrange - mu * (predicted_next - self.observed)
            state.multipliers = self.observed + (1.0 / mu) * state.lagrange
            state.model = model_next
            state.k += 1
            if on_iteration is not None:
                on_iteration(state)
        return state


def model_step(state: InversionState, cfg: RunConfig, acq: Acquisition) -> Model:
    """One model update against the multipliers held in ``state``."""
    return InversionEngine(cfg, acq, state.multipliers).model_step(state)


def multiplier_step(state: InversionState, model_next: Model, acq: Acquisition,
                    observed: ShotData, cfg: Optional[RunConfig] = None) -> ShotData:
    """d_k + d* - S(m_{k+1}) b*."""
    return InversionEngine(cfg or RunConfig(), acq, observed).multiplier_step(state, model_next)


def run_inversion(cfg: RunConfig, acq: Acquisition, observed: ShotData, initial: Model,
                  on_iteration: Optional[IterationCallback] = None) -> InversionState:
    return InversionEngine(cfg, acq, observed).run(initial, on_iteration)


def unscaled_al_iteration(cfg: RunConfig, acq: Acquisition, observed: ShotData, initial: Model,
                          on_iteration: Optional[IterationCallback] = None) -> InversionState:
    return InversionEngine(cfg, acq, observed).run_unscaled(initial, on_iteration)


def frequency_continuation(schedule: Sequence[Sequence[float]], cfg: RunConfig,
                           acq: Acquisition, observed: ShotData, initial: Model,
                           cycles: int = 1,
                           on_iteration: Optional[IterationCallback] = None) -> InversionState:
    """Run ``cfg`` once per frequency stage, ``cycles`` passes over the schedule.

    Each stage starts from the previous stage's final model with its
    multipliers reset to the stage's observed data and its own step length.
    The returned state carries the log and iteration count of all stages.
    """
    if not schedule or any(len(stage) == 0 for stage in schedule):
        raise ConfigurationError("Frequency schedule must be a nonempty list of nonempty stages",
                                 config_key='schedule')
    if cycles < 1:
        raise ConfigurationError(f"cycles must be positive, got {cycles}",
                                 config_key='cycles', config_value=cycles)

    logger = logging.getLogger('mwi.InversionEngine')
    model = initial
    log: List[IterationRecord] = []
    state: Optional[InversionState] = None
    for cycle in range(cycles):
        for stage in schedule:
            logger.info(f"Continuation cycle {cycle + 1}, stage {list(stage)} Hz")
            stage_cfg = replace(cfg, frequencies=tuple(stage))
            state = InversionEngine(stage_cfg, acq, observed).run(model, on_iteration,
                                                                  first_iteration=len(log))
            log.extend(state.log)
            model = state.model

    state.log = log
    return state
