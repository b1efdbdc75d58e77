"""
Unit Tests for Model Space
==========================

Model invariants, synthetic generators, bound projection, resampling and
the model file format.
"""

import numpy as np
import pytest

from mwi.core.exceptions import ValidationError
from mwi.core.models import Model
from mwi.core.services.model_builder import (
    grid_count, make_camembert, make_homogeneous, make_two_layer, model_rmse, project_bounds,
    resample_model, slowness_rmse,
)
from mwi._internal.storage import read_model, write_model


class TestModel:
    """Test the Model dataclass."""

    @pytest.mark.unit
    def test_bounds_default_to_extremes(self):
        """Test that bounds default to the model's own minimum and maximum."""
        m = np.array([[1.0, 2.0, 3.0]] * 3) * 1e-7
        model = Model(nx=3, nz=3, h=10.0, m=m)
        assert model.m_min == pytest.approx(1e-7)
        assert model.m_max == pytest.approx(3e-7)
        assert model.bound_range() == pytest.approx(2e-7)

    @pytest.mark.unit
    def test_invalid_models_rejected(self):
        """Test constructor validation."""
        good = np.full((3, 3), 1e-7)
        with pytest.raises(ValueError, match="at least 3 x 3"):
            Model(nx=2, nz=3, h=10.0, m=np.full((3, 2), 1e-7))
        with pytest.raises(ValueError, match="spacing must be positive"):
            Model(nx=3, nz=3, h=0.0, m=good)
        with pytest.raises(ValueError, match="strictly positive"):
            Model(nx=3, nz=3, h=10.0, m=-good)
        with pytest.raises(ValueError, match="expected"):
            Model(nx=4, nz=3, h=10.0, m=good)
        with pytest.raises(ValueError, match="Lower bound exceeds upper bound"):
            Model(nx=3, nz=3, h=10.0, m=good, m_min=2e-7, m_max=1e-7)

    @pytest.mark.unit
    def test_arrays_are_read_only_copies(self):
        """Test that the model owns a frozen copy of its array."""
        m = np.full((3, 3), 1e-7)
        model = Model(nx=3, nz=3, h=10.0, m=m)
        m[0, 0] = 5.0
        assert model.m[0, 0] == 1e-7
        with pytest.raises(ValueError):
            model.m[0, 0] = 2e-7

    @pytest.mark.unit
    def test_velocity_round_trip(self):
        """Test v = 1/sqrt(m) recovers generator velocities."""
        model = make_homogeneous(4, 5, 10.0, 2345.6)
        np.testing.assert_allclose(model.velocity, 2345.6, rtol=1e-12)


class TestGenerators:
    """Test the synthetic model generators."""

    @pytest.mark.unit
    @pytest.mark.critical
    def test_homogeneous(self):
        """Test constant squared slowness 1/v²."""
        model = make_homogeneous(3, 3, 10.0, 1000.0)
        np.testing.assert_array_equal(model.m, np.full((3, 3), 1e-6))

    @pytest.mark.unit
    def test_homogeneous_camembert_background_grid(self):
        """Test the Camembert background grid dimensions."""
        model = make_homogeneous(136, 170, 35.5, 4000.0)
        assert model.shape == (170, 136)

    @pytest.mark.unit
    def test_homogeneous_rejects_bad_velocity(self):
        """Test that non-positive velocity is rejected."""
        with pytest.raises(ValidationError, match="Velocity must be positive"):
            make_homogeneous(3, 3, 10.0, 0.0)
        with pytest.raises(ValidationError, match="at least 3 x 3"):
            make_homogeneous(2, 3, 10.0, 1000.0)

    @pytest.mark.unit
    @pytest.mark.critical
    @pytest.mark.parametrize("h, nx, nz", [(35.5, 136, 170), (71.0, 68, 85)])
    def test_camembert_grid_and_values(self, h, nx, nz):
        """Test Camembert dimensions and its two velocities."""
        model = make_camembert(h)
        assert (model.nx, model.nz) == (nx, nz)
        velocities = np.unique(np.round(model.velocity, 6))
        np.testing.assert_allclose(velocities, [4000.0, 4600.0])

    @pytest.mark.unit
    def test_camembert_disk_centered(self):
        """Test that the anomaly sits at the model center and scales with the fraction."""
        small = make_camembert(71.0, diameter_fraction=0.2)
        large = make_camembert(71.0, diameter_fraction=0.6)
        assert small.velocity[small.nz // 2, small.nx // 2] == pytest.approx(4600.0)
        assert small.velocity[0, 0] == pytest.approx(4000.0)
        assert np.sum(large.velocity > 4300) > np.sum(small.velocity > 4300)

    @pytest.mark.unit
    def test_camembert_too_coarse(self):
        """Test that h too coarse for three points is rejected."""
        with pytest.raises(ValidationError, match="too coarse"):
            make_camembert(4000.0)

    @pytest.mark.unit
    def test_two_layer(self):
        """Test the two-layer grid and layer velocities."""
        model = make_two_layer(30.0)
        assert (model.nx, model.nz) == (300, 50)
        assert model.m[10, 0] == pytest.approx((1 / 2000.0) ** 2)   # 0.3 km
        assert model.m[40, 0] == pytest.approx((1 / 4000.0) ** 2)   # 1.2 km

    @pytest.mark.unit
    def test_two_layer_at_sixty_meters(self):
        """Test the desk-scale reflection grid."""
        model = make_two_layer(60.0)
        assert (model.nx, model.nz) == (150, 25)

    @pytest.mark.unit
    def test_generators_deterministic(self):
        """Test bit-identical output for identical inputs."""
        np.testing.assert_array_equal(make_camembert(71.0).m, make_camembert(71.0).m)

    @pytest.mark.unit
    def test_grid_count(self):
        """Test grid counts from physical extents."""
        assert grid_count(4800.0, 35.5) == 136
        assert grid_count(9000.0, 30.0) == 300


class TestProjection:
    """Test bound projection."""

    @pytest.mark.unit
    def test_in_bounds_unchanged(self, true_model):
        """Test identity on a model already inside its bounds."""
        np.testing.assert_array_equal(project_bounds(true_model).m, true_model.m)

    @pytest.mark.unit
    def test_clamp_and_idempotence(self):
        """Test clamping to m_max and idempotence."""
        model = Model(nx=3, nz=3, h=1.0, m=np.full((3, 3), 2e-7), m_min=1e-8, m_max=1e-7)
        projected = project_bounds(model)
        np.testing.assert_array_equal(projected.m, np.full((3, 3), 1e-7))
        np.testing.assert_array_equal(project_bounds(projected).m, projected.m)

    @pytest.mark.unit
    def test_contraction(self):
        """Test |proj(a) - proj(b)| <= |a - b| elementwise."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = Model(nx=4, nz=4, h=1.0, m=rng.uniform(1e-8, 5e-7, (4, 4)), m_min=1e-7, m_max=3e-7)
            b = a.with_values(rng.uniform(1e-8, 5e-7, (4, 4)))
            assert np.all(np.abs(project_bounds(a).m - project_bounds(b).m) <= np.abs(a.m - b.m))

    @pytest.mark.unit
    def test_trial_values(self):
        """Test a trial array, negative entries included, is clamped into the model's bounds."""
        model = Model(nx=3, nz=3, h=1.0, m=np.full((3, 3), 2e-7), m_min=1e-7, m_max=3e-7)
        trial = np.array([[-1e-7, 2e-7, 5e-7]] * 3)
        projected = project_bounds(model, trial)
        np.testing.assert_array_equal(projected.m, np.array([[1e-7, 2e-7, 3e-7]] * 3))
        assert projected.m_min == model.m_min and projected.m_max == model.m_max

    @pytest.mark.unit
    def test_array_bounds(self):
        """Test elementwise array bounds."""
        m_max = np.full((3, 3), 1e-7)
        m_max[1, 1] = 3e-7
        model = Model(nx=3, nz=3, h=1.0, m=np.full((3, 3), 2e-7), m_min=1e-8, m_max=m_max)
        projected = project_bounds(model)
        assert projected.m[1, 1] == 2e-7
        assert projected.m[0, 0] == 1e-7


class TestResample:
    """Test grid resampling."""

    @pytest.mark.unit
    def test_refine_bp_grid(self):
        """Test 80 x 450 at 150 m refines to 160 x 900 at 75 m."""
        model = make_homogeneous(450, 80, 150.0, 3000.0)
        refined = resample_model(model, 2.0)
        assert (refined.nz, refined.nx, refined.h) == (160, 900, 75.0)

    @pytest.mark.unit
    @pytest.mark.parametrize("factor", [0.5, 2.0])
    def test_constant_preserved(self, factor):
        """Test that a constant model stays constant at either factor."""
        model = make_homogeneous(9, 7, 20.0, 2500.0)
        resampled = resample_model(model, factor)
        np.testing.assert_allclose(resampled.m, model.m[0, 0], rtol=1e-15)

    @pytest.mark.unit
    def test_round_trip_of_constant(self):
        """Test downsample after upsample of a constant is the identity on values."""
        model = make_homogeneous(8, 6, 20.0, 2500.0)
        back = resample_model(resample_model(model, 2.0), 0.5)
        assert back.shape == model.shape and back.h == model.h
        np.testing.assert_allclose(back.m, model.m, rtol=1e-15)

    @pytest.mark.unit
    @pytest.mark.parametrize("factor", [0.5, 2.0])
    def test_range_and_extent_preserved(self, factor):
        """Test value range within input range and extent within one cell."""
        model = make_camembert(142.0)
        resampled = resample_model(model, factor)
        assert resampled.m.min() >= model.m.min() - 1e-20
        assert resampled.m.max() <= model.m.max() + 1e-20
        for before, after in zip(model.extent, resampled.extent):
            assert abs(before - after) <= max(model.h, resampled.h)

    @pytest.mark.unit
    def test_bad_factor(self):
        """Test that other factors are rejected."""
        with pytest.raises(ValidationError, match="Resample factor"):
            resample_model(make_homogeneous(4, 4, 10.0, 2000.0), 3.0)


class TestModelErrors:
    """Test model error measures."""

    @pytest.mark.unit
    def test_rmse(self):
        """Test velocity and squared-slowness RMS error."""
        a = make_homogeneous(4, 4, 10.0, 2000.0)
        b = make_homogeneous(4, 4, 10.0, 2500.0)
        assert model_rmse(a, b) == pytest.approx(500.0)
        assert slowness_rmse(a, a) == 0.0

    @pytest.mark.unit
    def test_grid_mismatch(self):
        """Test that different grids are rejected."""
        with pytest.raises(ValidationError, match="grids differ"):
            model_rmse(make_homogeneous(4, 4, 10.0, 2000.0), make_homogeneous(5, 4, 10.0, 2000.0))


class TestModelFile:
    """Test the model file format."""

    @pytest.mark.unit
    def test_header_and_payload(self, temp_dir):
        """Test header text and float32 payload size."""
        path = write_model(temp_dir / 'm.bin', make_camembert(71.0))
        raw = path.read_bytes()
        header, payload = raw.split(b'\n', 1)
        assert header == b'MWI-MODEL 68 85 71'
        assert len(payload) == 68 * 85 * 4

    @pytest.mark.unit
    @pytest.mark.critical
    def test_round_trip_is_bit_exact(self, temp_dir):
        """Test write, read and write again reproduces the file bytes."""
        first = write_model(temp_dir / 'a.bin', make_camembert(71.0))
        second = write_model(temp_dir / 'b.bin', read_model(first))
        assert first.read_bytes() == second.read_bytes()

    @pytest.mark.unit
    def test_representable_values_round_trip(self, temp_dir):
        """Test exact squared slowness for float32-representable velocities."""
        model = make_homogeneous(5, 4, 12.5, 2048.0)
        loaded = read_model(write_model(temp_dir / 'h.bin', model))
        np.testing.assert_array_equal(loaded.m, model.m)
        assert loaded.h == 12.5

    @pytest.mark.unit
    def test_malformed_files(self, temp_dir):
        """Test rejection of wrong magic and truncated payloads."""
        bad = temp_dir / 'bad.bin'
        bad.write_bytes(b'NOPE 3 3 10\n' + b'\x00' * 36)
        with pytest.raises(ValidationError, match="not a model file"):
            read_model(bad)
        short = temp_dir / 'short.bin'
        short.write_bytes(b'MWI-MODEL 3 3 10\n' + b'\x00' * 8)
        with pytest.raises(ValidationError, match="payload bytes"):
            read_model(short)
