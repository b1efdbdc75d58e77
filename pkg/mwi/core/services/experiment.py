"""
Experiment Preparation
======================

Turns a ``RunManifest`` into concrete inputs (truth, initial model,
acquisition, observed data, run configuration) and runs it.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

from ..config.run_config import RunConfig
from ..engine import IterationCallback, frequency_continuation, run_inversion
from ..exceptions import ConfigurationError
from ..models import Acquisition, InversionState, Model, ShotData
from .acquisition_builder import build_acquisition, ricker_band
from .manifest_loader import RunManifest
from .model_builder import make_camembert, make_homogeneous, make_two_layer
from ..._internal.sensitivity import forward_map
from ..._internal.storage import read_model, read_shot_data

logger = logging.getLogger('mwi.Experiment')


@dataclass(frozen=True, eq=False)
class Experiment:
    """Inputs of one run."""
    initial: Model
    acquisition: Acquisition
    observed: ShotData
    config: RunConfig
    truth: Optional[Model] = None


def load_truth(manifest: RunManifest) -> Optional[Model]:
    if manifest.truth_model is not None:
        return read_model(manifest.truth_model)
    if manifest.truth_generator == 'camembert':
        return make_camembert(manifest.h, manifest.diameter_fraction)
    if manifest.truth_generator == 'two-layer':
        return make_two_layer(manifest.h)
    return None


def _bounded(model: Model, manifest: RunManifest, truth: Optional[Model]) -> Model:
    m_min = None if manifest.v_max is None else 1.0 / manifest.v_max ** 2
    m_max = None if manifest.v_min is None else 1.0 / manifest.v_min ** 2
    if truth is not None:
        m_min = truth.m_min if m_min is None else m_min
        m_max = truth.m_max if m_max is None else m_max
    if m_min is None and m_max is None:
        return model
    return model.with_bounds(model.m_min if m_min is None else m_min,
                             model.m_max if m_max is None else m_max)


def load_initial(manifest: RunManifest, truth: Optional[Model]) -> Model:
    """Initial model: a file, a homogeneous velocity, or the truth's slowest velocity."""
    if manifest.initial_model is not None:
        initial = read_model(manifest.initial_model)
    else:
        velocity = manifest.initial_velocity
        if velocity is None:
            velocity = float(truth.velocity.min())
        initial = make_homogeneous(truth.nx, truth.nz, truth.h, velocity)
    if truth is not None and not initial.same_grid(truth):
        raise ConfigurationError("Initial and true models are on different grids",
                                 config_key='experiment.initial_model')
    return _bounded(initial, manifest, truth)


def _frequencies(manifest: RunManifest, grid: Model, observed: Optional[ShotData]):
    if manifest.acquisition.frequencies is not None:
        return manifest.acquisition.frequencies
    if observed is not None:
        return observed.frequencies
    if manifest.schedule is not None:
        return tuple(sorted({f for stage in manifest.schedule for f in stage}))
    return ricker_band(manifest.acquisition.peak_frequency, manifest.acquisition.frequency_count,
                       v_min=grid.slowest_velocity(), h=grid.h)


def prepare_experiment(manifest: RunManifest) -> Experiment:
    truth = load_truth(manifest)
    initial = load_initial(manifest, truth)
    observed = None if manifest.observed_data is None else read_shot_data(manifest.observed_data)

    spec = manifest.acquisition
    acq = build_acquisition(
        initial, spec.n_sources, spec.source_side, spec.n_receivers, spec.receiver_side,
        spec.peak_frequency, standoff=spec.standoff,
        frequencies=_frequencies(manifest, initial, observed), amplitude=spec.amplitude,
    )
    if observed is None:
        logger.info("Synthesizing observed data from the true model")
        observed = forward_map(truth, acq, manifest.run.pml_cells)

    config = manifest.run if truth is None else replace(manifest.run, truth=truth)
    return Experiment(initial=initial, acquisition=acq, observed=observed, config=config, truth=truth)


def run_experiment(experiment: Experiment, manifest: RunManifest,
                   on_iteration: Optional[IterationCallback] = None) -> InversionState:
    """Single run, or the frequency-continuation schedule when the manifest has one."""
    if manifest.schedule is not None:
        return frequency_continuation(manifest.schedule, experiment.config, experiment.acquisition,
                                      experiment.observed, experiment.initial,
                                      cycles=manifest.cycles, on_iteration=on_iteration)
    return run_inversion(experiment.config, experiment.acquisition, experiment.observed,
                         experiment.initial, on_iteration)
