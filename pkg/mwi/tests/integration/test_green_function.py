"""
Wavefield Accuracy Tests
========================

Forward solutions in a homogeneous medium against the analytic 2D Green's
function, and source/receiver reciprocity of the PML operator.
"""

import numpy as np
import pytest
from scipy.special import hankel1

from mwi.core.models import Acquisition
from mwi.core.services.model_builder import make_homogeneous
from mwi._internal.helmholtz import ricker_spectrum
from mwi._internal.sensitivity import forward_map

VELOCITY = 2000.0
FREQUENCY = 5.0
H = 20.0
CENTER = (30, 30)
RECEIVERS = ((30, 40), (30, 45), (30, 50))


@pytest.fixture
def homogeneous_model():
    return make_homogeneous(61, 61, H, VELOCITY)


def _acquisition(sources, receivers, amplitude=1.0):
    return Acquisition(nx=61, nz=61, h=H, sources=sources, receivers=receivers,
                       peak_frequency=FREQUENCY, frequencies=(FREQUENCY,), amplitude=amplitude)


class TestGreenFunction:
    """Point-source response versus (i/4) H0(kr)."""

    @pytest.mark.integration
    @pytest.mark.critical
    def test_matches_hankel_solution(self, homogeneous_model):
        """Amplitude within 3% and phase within 0.05 rad, 10 to 20 cells from the source."""
        acq = _acquisition((CENTER,), RECEIVERS, amplitude=3.0)
        data = forward_map(homogeneous_model, acq, pml_cells=20)

        k = 2.0 * np.pi * FREQUENCY / VELOCITY
        r = np.array([H * abs(ix - CENTER[1]) for _, ix in RECEIVERS])
        expected = 3.0 * ricker_spectrum(FREQUENCY, FREQUENCY) * 0.25j * hankel1(0, k * r)

        ratio = data.values[0, 0, :] / expected
        assert np.all(np.abs(np.abs(ratio) - 1.0) <= 0.03)
        assert np.all(np.abs(np.angle(ratio)) <= 0.05)

    @pytest.mark.integration
    def test_amplitude_decays_with_distance(self, homogeneous_model):
        acq = _acquisition((CENTER,), RECEIVERS)
        amplitudes = np.abs(forward_map(homogeneous_model, acq, pml_cells=20).values[0, 0, :])

        assert amplitudes[0] > amplitudes[1] > amplitudes[2]


class TestReciprocity:
    """Swapping a source and a receiver leaves the recorded value unchanged."""

    @pytest.mark.integration
    def test_source_receiver_swap(self):
        velocity = np.full((24, 20), 2000.0)
        velocity[8:16, 6:14] = 2300.0
        model = make_homogeneous(20, 24, 10.0, 2000.0).with_values(1.0 / velocity ** 2)
        a, b = (3, 4), (19, 15)

        forward = forward_map(model, Acquisition(nx=20, nz=24, h=10.0, sources=(a,), receivers=(b,),
                                                 peak_frequency=10.0, frequencies=(10.0,)))
        backward = forward_map(model, Acquisition(nx=20, nz=24, h=10.0, sources=(b,), receivers=(a,),
                                                  peak_frequency=10.0, frequencies=(10.0,)))

        assert np.allclose(forward.values, backward.values, rtol=1e-8, atol=0.0)
