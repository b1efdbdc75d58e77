"""
Unit Tests for the Helmholtz Engine
===================================

Operator assembly, banded factorization, forward/adjoint solves, sampling
and injection, and the Ricker spectrum.
"""

import logging
import math

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from mwi.core.exceptions import SolverError, ValidationError
from mwi.core.models import Acquisition, Field
from mwi.core.services.model_builder import make_homogeneous
from mwi._internal.helmholtz import (
    BandedLU, assemble, band_ordering, factorize, field_inner, inject, node_indices, ricker_spectrum,
    sample, solve_adjoint, solve_forward, source_terms,
)


def _random_field(shape, pml_cells, h, seed):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return Field(values=values, pml_cells=pml_cells, h=h)


def _random_rhs(fac, seed: int, columns: int = 2) -> np.ndarray:
    rng = np.random.default_rng(seed)
    shape = (fac.operator.n_nodes, columns)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestAssembly:
    """Test operator assembly."""

    @pytest.mark.unit
    @pytest.mark.critical
    def test_interior_stencil_without_absorption(self):
        """Test center -ω²m + 4/h² and neighbors -1/h² when σ = 0."""
        model = make_homogeneous(3, 3, 10.0, 1000.0)
        omega = 2 * math.pi * 5.0
        op = assemble(model, omega, pml_cells=8, reflection=1.0)
        assert op.shape == (19, 19)
        np.testing.assert_allclose(op.center, -omega ** 2 * 1e-6 + 4.0 / 100.0, rtol=1e-14)
        np.testing.assert_allclose(op.east, -1.0 / 100.0, rtol=1e-14)
        np.testing.assert_allclose(op.south, -1.0 / 100.0, rtol=1e-14)

    @pytest.mark.unit
    def test_pml_is_complex_only_in_layer(self, true_model):
        """Test that stretching vanishes in the interior and grows outward."""
        op = assemble(true_model, 2 * math.pi * 10.0)
        p = op.pml_cells
        interior = op.stretch[p:-p, p:-p]
        np.testing.assert_array_equal(interior, np.ones_like(interior))
        assert np.abs(op.stretch[0, 0].imag) > np.abs(op.stretch[p - 1, p - 1].imag) > 0

    @pytest.mark.unit
    @pytest.mark.critical
    def test_complex_symmetric(self, true_model):
        """Test A^t = A without conjugation."""
        matrix = assemble(true_model, 2 * math.pi * 8.0).to_sparse()
        assert abs(matrix - matrix.T).max() == 0.0
        rng = np.random.default_rng(1)
        x = rng.standard_normal(matrix.shape[0]) + 1j * rng.standard_normal(matrix.shape[0])
        y = rng.standard_normal(matrix.shape[0]) + 1j * rng.standard_normal(matrix.shape[0])
        assert x @ (matrix @ y) == pytest.approx(y @ (matrix @ x), rel=1e-12)

    @pytest.mark.unit
    def test_matvec_matches_sparse(self, true_model):
        """Test the stencil apply against the assembled matrix."""
        op = assemble(true_model, 2 * math.pi * 8.0)
        u = np.random.default_rng(2).standard_normal(op.shape).astype(complex)
        np.testing.assert_allclose(op.matvec(u).ravel(), op.to_sparse() @ u.ravel(), rtol=1e-12)

    @pytest.mark.unit
    def test_edge_extension(self, true_model):
        """Test that pad nodes carry the nearest interior cell."""
        op = assemble(true_model, 2 * math.pi * 8.0)
        p = op.pml_cells
        assert op.pad_index[0, 0] == 0
        assert op.pad_index[-1, -1] == true_model.nz * true_model.nx - 1
        assert op.pad_index[p, p + 3] == 3

    @pytest.mark.unit
    def test_invalid_arguments(self, true_model):
        """Test rejection of thin layers, bad frequencies and reflection."""
        with pytest.raises(ValidationError, match="at least 8 cells"):
            assemble(true_model, 10.0, pml_cells=4)
        with pytest.raises(ValidationError, match="Angular frequency"):
            assemble(true_model, 0.0)
        with pytest.raises(ValidationError, match="reflection"):
            assemble(true_model, 10.0, reflection=0.0)

    @pytest.mark.unit
    def test_dispersion_warning(self, true_model, caplog):
        """Test that fewer than 6 points per wavelength only warns."""
        with caplog.at_level(logging.WARNING, logger='mwi'):
            op = assemble(true_model, 2 * math.pi * 40.0)
        assert op is not None
        assert any("Dispersion guard" in record.getMessage() for record in caplog.records)


class TestFactorization:
    """Test the banded LU solves."""

    @pytest.mark.unit
    def test_band_ordering_uses_shorter_axis(self):
        """Test bandwidth equals the shorter padded dimension."""
        order, bandwidth = band_ordering((5, 9))
        assert bandwidth == 5
        assert order[:3].tolist() == [0, 9, 18]
        order, bandwidth = band_ordering((9, 5))
        assert bandwidth == 5
        assert order[:3].tolist() == [0, 1, 2]

    @pytest.mark.unit
    @pytest.mark.critical
    @pytest.mark.parametrize("shape", [(12, 12), (10, 17), (17, 10)])
    def test_solve_residual(self, shape):
        """Test ‖A solve(b) - b‖ / ‖b‖ <= 1e-10."""
        nz, nx = shape
        model = make_homogeneous(nx, nz, 10.0, 2000.0)
        fac = factorize(assemble(model, 2 * math.pi * 9.0))
        matrix = fac.operator.to_sparse()
        rng = np.random.default_rng(4)
        b = rng.standard_normal((matrix.shape[0], 3)) + 1j * rng.standard_normal((matrix.shape[0], 3))
        u = fac.solve(b)
        assert np.linalg.norm(matrix @ u - b) / np.linalg.norm(b) <= 1e-10
        v = fac.solve_adjoint(b)
        assert np.linalg.norm(matrix.conj().T @ v - b) / np.linalg.norm(b) <= 1e-10

    @pytest.mark.unit
    def test_field_solves(self, true_model):
        """Test Field-level forward and adjoint solves."""
        fac = factorize(assemble(true_model, 2 * math.pi * 8.0))
        source = _random_field(fac.shape, fac.operator.pml_cells, true_model.h, 5)
        u = solve_forward(fac, source)
        np.testing.assert_allclose(fac.operator.matvec(u.values), source.values, atol=1e-9 * np.abs(source.values).max())
        v = solve_adjoint(fac, source)
        assert v.shape == source.shape

    @pytest.mark.unit
    def test_field_shape_mismatch(self, true_model):
        """Test that fields from another grid are rejected."""
        fac = factorize(assemble(true_model, 2 * math.pi * 8.0))
        wrong = _random_field((30, 30), 8, true_model.h, 6)
        with pytest.raises(ValidationError, match="does not match"):
            solve_forward(fac, wrong)

    @pytest.mark.unit
    def test_singular_matrix(self):
        """Test that a zero pivot raises SolverError."""
        matrix = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(SolverError, match="pivot"):
            BandedLU.factor(matrix, np.arange(2), 1)

    @pytest.mark.unit
    def test_real_factors_complex_rhs(self):
        """Test complex right-hand sides against real factors."""
        matrix = sp.csr_matrix(np.array([[4.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 4.0]]))
        factors = BandedLU.factor(matrix, np.arange(3), 1)
        b = np.array([1 + 2j, -1j, 3.0])
        np.testing.assert_allclose(matrix @ factors.solve(b), b, rtol=1e-13)


    @pytest.mark.unit
    @pytest.mark.critical
    def test_dense_lu_oracle(self, true_model):
        """Test banded solves against a dense LU of the same operator."""
        fac = factorize(assemble(true_model, 2 * math.pi * 9.0))
        dense = fac.operator.to_sparse().toarray()
        rng = np.random.default_rng(21)
        b = rng.standard_normal((dense.shape[0], 2)) + 1j * rng.standard_normal((dense.shape[0], 2))
        expected = scipy.linalg.lu_solve(scipy.linalg.lu_factor(dense), b)
        np.testing.assert_allclose(fac.solve(b), expected, rtol=1e-10,
                                   atol=1e-10 * np.abs(expected).max())

    @pytest.mark.unit
    def test_factorization_is_deterministic(self, true_model):
        """Test two factorizations of one operator give bitwise identical factors and solves."""
        op = assemble(true_model, 2 * math.pi * 8.0)
        first = factorize(op)
        second = factorize(op)
        np.testing.assert_array_equal(first.factors.lu, second.factors.lu)
        np.testing.assert_array_equal(first.factors.pivots, second.factors.pivots)
        b = _random_rhs(first, 22)
        np.testing.assert_array_equal(first.solve(b), second.solve(b))

    @pytest.mark.unit
    def test_factor_reuse(self, true_model):
        """Test solves sharing one factorization match one-column solves with fresh factors."""
        op = assemble(true_model, 2 * math.pi * 10.0)
        shared = factorize(op)
        b = _random_rhs(shared, 23, columns=3)
        together = shared.solve(b)
        for column in range(b.shape[1]):
            alone = factorize(op).solve(b[:, column])
            np.testing.assert_allclose(together[:, column], alone, rtol=1e-12,
                                       atol=1e-14 * np.abs(alone).max())
            np.testing.assert_allclose(shared.solve(b[:, column]), alone, rtol=1e-12,
                                       atol=1e-14 * np.abs(alone).max())

    @pytest.mark.unit
    def test_zero_source_zero_field(self, true_model):
        fac = factorize(assemble(true_model, 2 * math.pi * 8.0))
        zero = np.zeros(fac.operator.n_nodes, dtype=np.complex128)
        np.testing.assert_array_equal(fac.solve(zero), zero)
        np.testing.assert_array_equal(fac.solve_adjoint(zero), zero)

    @pytest.mark.unit
    @pytest.mark.critical
    def test_wavelength_scales_with_frequency(self):
        """Test doubling f while halving h leaves the wavefield unchanged up to W(f).

        A(2ω, h/2) = 4 A(ω, h) node for node, PML included, so the field keeps
        the same number of cells per wavelength.
        """
        coarse = make_homogeneous(16, 16, 10.0, 2000.0)
        fine = make_homogeneous(16, 16, 5.0, 2000.0)
        positions = dict(sources=((3, 8),), receivers=((12, 4), (12, 8)), peak_frequency=10.0)
        acq_coarse = Acquisition(nx=16, nz=16, h=10.0, frequencies=(8.0,), **positions)
        acq_fine = Acquisition(nx=16, nz=16, h=5.0, frequencies=(16.0,), **positions)

        u_coarse = factorize(assemble(coarse, 2 * math.pi * 8.0)).solve(
            source_terms(acq_coarse, 8.0, 12))
        u_fine = factorize(assemble(fine, 2 * math.pi * 16.0)).solve(
            source_terms(acq_fine, 16.0, 12))
        ratio = ricker_spectrum(10.0, 16.0) / ricker_spectrum(10.0, 8.0)
        np.testing.assert_allclose(u_fine, ratio * u_coarse, rtol=1e-9,
                                   atol=1e-9 * np.abs(u_fine).max())


class TestSampling:
    """Test sampling, injection and the source wavelet."""

    @pytest.mark.unit
    @pytest.mark.critical
    def test_sample_inject_adjoint(self, small_acquisition):
        """Test <P u, r> = <u, P^t r> in the grid inner product."""
        shape = (small_acquisition.nz + 24, small_acquisition.nx + 24)
        u = _random_field(shape, 12, small_acquisition.h, 7)
        rng = np.random.default_rng(8)
        r = rng.standard_normal(small_acquisition.n_receivers) + 1j * rng.standard_normal(small_acquisition.n_receivers)
        lhs = np.vdot(sample(u, small_acquisition), r)
        rhs = field_inner(u, inject(r, small_acquisition))
        assert rhs == pytest.approx(lhs, rel=1e-12)

    @pytest.mark.unit
    def test_sample_unit_field(self, small_acquisition):
        """Test sampling a field of ones returns ones at every receiver."""
        shape = (small_acquisition.nz + 24, small_acquisition.nx + 24)
        ones = Field(values=np.ones(shape, dtype=np.complex128), pml_cells=12, h=small_acquisition.h)
        np.testing.assert_array_equal(sample(ones, small_acquisition),
                                      np.ones(small_acquisition.n_receivers))

    @pytest.mark.unit
    def test_inject_single_receiver(self, small_acquisition):
        """Test injecting e_1 loads only the first receiver's node, with weight 1/h²."""
        unit = np.zeros(small_acquisition.n_receivers)
        unit[0] = 1.0
        loads = inject(unit, small_acquisition).values.ravel()
        node = node_indices(small_acquisition.receivers[:1], small_acquisition, 12)[0]
        assert np.flatnonzero(loads).tolist() == [node]
        assert loads[node] == pytest.approx(1.0 / small_acquisition.h ** 2)

    @pytest.mark.unit
    def test_inject_rejects_wrong_length(self, small_acquisition):
        """Test injection length check."""
        with pytest.raises(ValidationError, match="receiver values"):
            inject(np.ones(3), small_acquisition)

    @pytest.mark.unit
    def test_ricker_peak(self):
        """Test the amplitude spectrum peaks at f_p and vanishes at 0."""
        f = np.linspace(0.0, 30.0, 3001)
        spectrum = ricker_spectrum(10.0, f)
        assert f[np.argmax(spectrum)] == pytest.approx(10.0)
        assert spectrum[0] == 0.0
        assert isinstance(ricker_spectrum(10.0, 10.0), float)

    @pytest.mark.unit
    def test_source_terms(self, small_acquisition):
        """Test one Ricker-weighted point load per source column."""
        rhs = source_terms(small_acquisition, 10.0, 12)
        assert rhs.shape[1] == small_acquisition.n_sources
        expected = small_acquisition.amplitude * ricker_spectrum(10.0, 10.0) / small_acquisition.h ** 2
        for column in range(rhs.shape[1]):
            assert np.count_nonzero(rhs[:, column]) == 1
            assert rhs[:, column].sum() == pytest.approx(expected)

    @pytest.mark.unit
    def test_field_decays_into_pml(self, true_model, small_acquisition):
        """Test the wavefield is attenuated toward the outer boundary."""
        fac = factorize(assemble(true_model, 2 * math.pi * 10.0))
        u = np.abs(fac.solve(source_terms(small_acquisition, 10.0, 12))[:, 0]).reshape(fac.shape)
        p = 12
        inner_ring = np.concatenate([u[p, p:-p], u[-p - 1, p:-p], u[p:-p, p], u[p:-p, -p - 1]])
        outer_ring = np.concatenate([u[0, :], u[-1, :], u[:, 0], u[:, -1]])
        assert outer_ring.mean() < 0.5 * inner_ring.mean()
