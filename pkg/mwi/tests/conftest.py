"""
Pytest Configuration and Shared Fixtures
========================================

Small models, acquisitions and manifests shared by the mwi test suite.
"""

import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

from mwi.core.models import Acquisition, Model, ShotData
from mwi.core.services.model_builder import make_homogeneous
from mwi._internal.sensitivity import forward_map

FIXTURES_DIR = Path(__file__).parent / 'fixtures'
REPO_ROOT = Path(__file__).resolve().parents[2]


# Pytest markers configuration
def pytest_configure(config):
    """Configure pytest markers."""
    config.addinivalue_line("markers", "unit: Fast, isolated unit tests")
    config.addinivalue_line("markers", "integration: End-to-end integration tests")
    config.addinivalue_line("markers", "slow: Desk-scale acceptance runs (minutes)")
    config.addinivalue_line("markers", "critical: Essential tests that must pass")
    config.addinivalue_line("markers", "extended: Extended test coverage for edge cases")
    config.addinivalue_line("markers", "regression: Comparisons against recorded reference runs")


def block_model(n: int = 12, h: float = 10.0, background: float = 2000.0,
                anomaly: float = 2200.0) -> Model:
    """n x n model with a square anomaly in the middle third; bounds 1800..2400 m/s."""
    velocity = np.full((n, n), background)
    velocity[n // 3:2 * n // 3, n // 3:2 * n // 3] = anomaly
    return Model(nx=n, nz=n, h=h, m=1.0 / velocity ** 2,
                 m_min=1.0 / 2400.0 ** 2, m_max=1.0 / 1800.0 ** 2)


def line_acquisition(model: Model, frequencies=(8.0, 10.0), n_sources: int = 2) -> Acquisition:
    """Sources on row 2, receivers on every column of row nz - 3."""
    sources = tuple((2, int(ix)) for ix in np.linspace(2, model.nx - 3, n_sources).round())
    receivers = tuple((model.nz - 3, ix) for ix in range(model.nx))
    return Acquisition(nx=model.nx, nz=model.nz, h=model.h, sources=sources, receivers=receivers,
                       peak_frequency=10.0, frequencies=tuple(frequencies))


@pytest.fixture
def true_model() -> Model:
    return block_model()


@pytest.fixture
def start_model() -> Model:
    """Homogeneous 2000 m/s start with the same bounds as ``true_model``."""
    return make_homogeneous(12, 12, 10.0, 2000.0, v_min=1800.0, v_max=2400.0)


@pytest.fixture
def small_acquisition(true_model) -> Acquisition:
    return line_acquisition(true_model)


@pytest.fixture
def observed_data(true_model, small_acquisition) -> ShotData:
    return forward_map(true_model, small_acquisition)


@pytest.fixture
def temp_dir():
    """Temporary directory removed after the test."""
    directory = tempfile.mkdtemp()
    yield Path(directory)
    shutil.rmtree(directory)


@pytest.fixture
def minimal_manifest_text() -> str:
    return """
experiment:
  truth_generator: camembert
  h: 300.0
inversion:
  method: mwi
"""


@pytest.fixture
def full_manifest_text() -> str:
    return """
experiment:
  name: toy
  truth_generator: camembert
  h: 300.0
  initial_velocity: 4000.0
  v_min: 4000.0
  v_max: 4600.0
acquisition:
  n_sources: 3
  source_side: top
  n_receivers: 16
  receiver_side: bottom
  peak_frequency: 1.5
  frequencies: [1.0, 1.5]
inversion:
  method: mwi
  mu: 1.0
  iterations: 2
regularizer:
  kind: tv
  weight: 1.0e-9
output:
  snapshot_every: 1
  gather_sources: [0, 2]
"""
