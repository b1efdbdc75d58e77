"""
Experiment Regression Tests
===========================

Full runs of the shipped Camembert and two-layer manifests, with MWI and
penalty FWI, checked against the acceptance thresholds and against the
recorded reference results in ``fixtures/reference_runs.yaml``.

These take minutes each and are deselected by default; run them with
``pytest -m slow``.
"""

from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pytest
import yaml

from mwi.core.engine import run_inversion
from mwi.core.services import ManifestLoader, model_rmse
from mwi.core.services.experiment import Experiment, prepare_experiment

pytestmark = [pytest.mark.slow, pytest.mark.regression]

REPO_ROOT = Path(__file__).resolve().parents[3]
EXPERIMENTS_DIR = REPO_ROOT / 'experiments'
REFERENCES = Path(__file__).resolve().parents[1] / 'fixtures' / 'reference_runs.yaml'


@pytest.fixture(scope='module')
def references() -> Dict:
    return yaml.safe_load(REFERENCES.read_text())


@pytest.fixture(scope='module')
def runs(tmp_path_factory):
    """Lazily computed final states keyed by (experiment, method, mu, overrides).

    ``overrides`` replaces manifest inversion settings, so a reference entry
    is reproduced with the settings it was recorded under.
    """
    cache = {}
    prepared: Dict[str, Experiment] = {}

    def get(name: str, method: str, mu: Optional[float] = None,
            overrides: Optional[Dict] = None):
        if name not in prepared:
            text = (EXPERIMENTS_DIR / f"{name}.yaml").read_text()
            manifest = ManifestLoader().from_yaml(text, base_dir=tmp_path_factory.mktemp(name),
                                                  name=name)
            prepared[name] = prepare_experiment(manifest)
        experiment = prepared[name]
        mu = experiment.config.mu if mu is None else float(mu)
        overrides = dict(overrides or {})
        key = (name, method, mu, tuple(sorted(overrides.items())))
        if key not in cache:
            cfg = replace(experiment.config, method=method, mu=mu, checkpoint_dir=None,
                          **overrides)
            cache[key] = run_inversion(cfg, experiment.acquisition, experiment.observed,
                                       experiment.initial)
        return experiment, cache[key]

    return get


def _check_reference(references: Dict, experiment: str, key: str, value: float) -> None:
    expected = references[experiment][key]
    if expected is not None:
        assert value == pytest.approx(expected, rel=references['relative_tolerance'])


def _layer_mae(model, truth) -> float:
    """Mean absolute velocity error over the lower layer, two cells clear of its edges."""
    lower = truth.velocity > truth.velocity.min()
    first = int(np.argmax(lower.any(axis=1)))
    interior = truth.velocity[first + 2:-2, 2:-2]
    estimate = model.velocity[first + 2:-2, 2:-2]
    return float(np.mean(np.abs(estimate - interior)))


class TestCamembert:
    """Transmission experiment: MWI escapes the local minimum FWI settles in."""

    def test_mwi_beats_fwi(self, runs):
        experiment, mwi_state = runs('camembert', 'mwi')
        _, fwi_state = runs('camembert', 'fwi')
        initial = model_rmse(experiment.initial, experiment.truth)
        mwi_error = model_rmse(mwi_state.model, experiment.truth)
        fwi_error = model_rmse(fwi_state.model, experiment.truth)

        assert len(mwi_state.log) == 200
        assert mwi_error <= 0.6 * initial
        assert mwi_error <= 0.5 * fwi_error

    def test_recorded_reference(self, runs, references):
        overrides = references['camembert']['config']
        experiment, mwi_state = runs('camembert', 'mwi', overrides=overrides)
        _, fwi_state = runs('camembert', 'fwi', overrides=overrides)

        _check_reference(references, 'camembert', 'initial_rmse',
                         model_rmse(experiment.initial, experiment.truth))
        _check_reference(references, 'camembert', 'mwi_final_rmse',
                         model_rmse(mwi_state.model, experiment.truth))
        _check_reference(references, 'camembert', 'fwi_final_rmse',
                         model_rmse(fwi_state.model, experiment.truth))
        _check_reference(references, 'camembert', 'mwi_initial_e_true', mwi_state.log[0].e_true)
        _check_reference(references, 'camembert', 'mwi_final_e_true', mwi_state.log[-1].e_true)
        _check_reference(references, 'camembert', 'fwi_final_e_true', fwi_state.log[-1].e_true)

    def test_misfit_tail_is_monotone(self, runs):
        _, state = runs('camembert', 'mwi')
        tail = np.array([record.e_true for record in state.log[10:]])

        increases = np.count_nonzero(np.diff(tail) > 0)
        assert increases <= 0.05 * (len(tail) - 1)

    def test_penalty_robustness(self, runs):
        """With reg none the fixed step absorbs μ, so the spread is round-off only."""
        experiment, reference = runs('camembert', 'mwi', 1.0)
        baseline = model_rmse(reference.model, experiment.truth)

        for mu in (0.1, 10.0):
            _, state = runs('camembert', 'mwi', mu)
            assert abs(model_rmse(state.model, experiment.truth) - baseline) <= 0.2 * baseline


class TestReflection:
    """Two-layer reflection experiment, bounds off."""

    def test_lower_layer_recovered(self, runs, references):
        overrides = references['reflection']['config']
        experiment, mwi_state = runs('reflection', 'mwi', overrides=overrides)
        _, fwi_state = runs('reflection', 'fwi', overrides=overrides)
        contrast = float(experiment.truth.velocity.max() - experiment.truth.velocity.min())
        mae = _layer_mae(mwi_state.model, experiment.truth)
        mwi_error = model_rmse(mwi_state.model, experiment.truth)
        fwi_error = model_rmse(fwi_state.model, experiment.truth)

        assert mae <= 0.1 * contrast
        assert mwi_error < fwi_error
        _check_reference(references, 'reflection', 'mwi_layer_mae', mae)
        _check_reference(references, 'reflection', 'mwi_final_rmse', mwi_error)
        _check_reference(references, 'reflection', 'fwi_final_rmse', fwi_error)
