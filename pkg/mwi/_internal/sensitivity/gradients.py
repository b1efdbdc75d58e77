"""
Adjoint-State Sensitivities
===========================

Misfit gradient, Jacobian action and its transpose, the diagonal
pseudo-Hessian and the data-domain Gauss-Newton modified gradient.

The symmetric PML operator depends on m through -ω² s_x s_z m on the
edge-extended grid, so ∂A/∂m δm = -ω² s ∘ E δm with E the edge extension.
Every interior quantity below folds the pad back with E^t (``np.bincount``
over ``pad_index``), which makes them exact derivatives of the padded
problem.
"""

from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ...core.config.system_config import SystemConfig
from ...core.exceptions import NumericalError, SolverError, ValidationError
from ...core.models import Acquisition, GradientBundle, Model, ShotData
from .simulator import FrequencySolution, Simulator


def _simulator(model: Model, acq: Acquisition, simulator: Optional[Simulator]) -> Simulator:
    if simulator is None:
        return Simulator(model, acq)
    if simulator.model is not model or simulator.acq != acq:
        raise ValidationError("Simulator was built for a different model or acquisition",
                              field='simulator')
    return simulator


def _fold(sol: FrequencySolution, padded: np.ndarray, model: Model) -> np.ndarray:
    return np.bincount(sol.operator.pad_index.ravel(), weights=padded,
                       minlength=model.nz * model.nx)


def _check_data(data: ShotData, acq: Acquisition, name: str) -> None:
    if not data.matches(acq):
        raise ValidationError(
            f"{name} has shape {data.shape} and frequencies {data.frequencies}; "
            f"acquisition expects {acq.data_shape} at {acq.frequencies}",
            field=name,
        )


def receiver_loads(sim: Simulator, residual: np.ndarray) -> np.ndarray:
    """Euclidean P^t of an (N_s, N_r) residual block, shape (n_nodes, N_s)."""
    n_sources = residual.shape[0]
    loads = np.zeros((sim.solutions()[0].fields.shape[0], n_sources), dtype=np.complex128)
    np.add.at(loads, (sim.receiver_nodes[:, None], np.arange(n_sources)[None, :]), residual.T)
    return loads


def jacobian_transpose(model: Model, acq: Acquisition, residual: ShotData,
                       simulator: Optional[Simulator] = None) -> np.ndarray:
    """Re(J^H r) on the interior grid.

    Per frequency the conjugated residual is back-propagated with one
    adjoint solve per source and correlated with the forward field.
    """
    sim = _simulator(model, acq, simulator)
    _check_data(residual, acq, 'residual')

    def per_frequency(sol: FrequencySolution) -> np.ndarray:
        adjoint = sol.factorization.solve_adjoint(receiver_loads(sim, residual.values[:, sol.index, :]))
        correlation = np.sum(np.conj(adjoint) * sol.fields, axis=1)
        padded = sol.omega ** 2 * np.real(sol.operator.stretch.ravel() * correlation)
        return _fold(sol, padded, model)

    gradient = np.zeros(model.nz * model.nx)
    # frequency order fixed for deterministic reduction
    for partial in sim.map_frequencies(per_frequency):
        gradient += partial
    return gradient.reshape(model.shape)


def misfit_and_gradient(model: Model, acq: Acquisition, target: ShotData,
                        simulator: Optional[Simulator] = None,
                        with_hessian: bool = False) -> GradientBundle:
    """E = ½ Σ |S(m)b* - d|² and its gradient with respect to interior m."""
    _check_data(target, acq, 'target')
    sim = _simulator(model, acq, simulator)
    predicted = sim.data()
    residual = predicted - target
    gradient = jacobian_transpose(model, acq, residual, sim)
    hessian = pseudo_hessian_diag(model, acq, sim) if with_hessian else None
    return GradientBundle(misfit=residual.half_norm_squared(), gradient=gradient,
                          hessian_diag=hessian, predicted=predicted)


def jacobian_apply(model: Model, acq: Acquisition, dm: np.ndarray,
                   simulator: Optional[Simulator] = None) -> ShotData:
    """J δm = P A^{-1} (ω² s ∘ E δm ∘ u) for every source and frequency."""
    dm = np.asarray(dm, dtype=np.float64)
    if dm.shape != model.shape:
        raise ValidationError(f"Perturbation has shape {dm.shape}, expected {model.shape}",
                              field='dm')
    sim = _simulator(model, acq, simulator)

    def per_frequency(sol: FrequencySolution) -> np.ndarray:
        dm_padded = dm.ravel()[sol.operator.pad_index.ravel()]
        scatter = (sol.omega ** 2 * sol.operator.stretch.ravel() * dm_padded)[:, None] * sol.fields
        return sol.factorization.solve(scatter)[sim.receiver_nodes, :].T

    values = np.stack(sim.map_frequencies(per_frequency), axis=1)
    return ShotData(values, acq.frequencies)


def pseudo_hessian_diag(model: Model, acq: Acquisition,
                        simulator: Optional[Simulator] = None) -> np.ndarray:
    """Σ over sources and frequencies of |ω² s u|², folded onto the interior (undamped)."""
    sim = _simulator(model, acq, simulator)

    def per_frequency(sol: FrequencySolution) -> np.ndarray:
        weighted = sol.operator.stretch.ravel()[:, None] * sol.fields
        padded = sol.omega ** 4 * np.sum(np.abs(weighted) ** 2, axis=1)
        return _fold(sol, padded, model)

    diagonal = np.zeros(model.nz * model.nx)
    for partial in sim.map_frequencies(per_frequency):
        diagonal += partial
    return diagonal.reshape(model.shape)


def damp_pseudo_hessian(diagonal: np.ndarray, beta: float = SystemConfig.PSEUDO_HESSIAN_BETA) -> np.ndarray:
    """diag + β max(diag): strictly positive where illumination vanishes."""
    peak = float(np.max(diagonal))
    if not peak > 0:
        raise NumericalError("Pseudo-Hessian vanishes everywhere; the model is not illuminated")
    return diagonal + beta * peak


def data_domain_hessian(model: Model, acq: Acquisition, index: int,
                        simulator: Optional[Simulator] = None) -> np.ndarray:
    """S S^H (N_r x N_r) at frequency ``index`` from N_r adjoint solves of A^H x = P^t e_r."""
    sim = _simulator(model, acq, simulator)
    sol = sim.solutions()[index]
    identity = np.eye(acq.n_receivers, dtype=np.complex128)
    columns = sol.factorization.solve_adjoint(receiver_loads(sim, identity))
    return columns.conj().T @ columns


def default_gn_eps(ssh: np.ndarray) -> float:
    return SystemConfig.GN_EPS_FRACTION * float(np.mean(np.real(np.diag(ssh))))


def apply_data_hessian_inverse(model: Model, acq: Acquisition, residual: ShotData,
                               eps: Optional[float] = None,
                               simulator: Optional[Simulator] = None) -> ShotData:
    """Replace each residual by Q^{-1} r with Q = S S^H + εI built once per frequency."""
    if eps is not None and not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps}", field='eps', value=eps)
    sim = _simulator(model, acq, simulator)
    _check_data(residual, acq, 'residual')

    def per_frequency(sol: FrequencySolution) -> np.ndarray:
        ssh = data_domain_hessian(model, acq, sol.index, sim)
        shift = default_gn_eps(ssh) if eps is None else eps
        q = ssh + shift * np.eye(acq.n_receivers)
        try:
            factor = cho_factor(q)
        except LinAlgError as error:
            raise SolverError("Data-domain Gauss-Newton matrix is not positive definite",
                              frequency=sol.frequency, diagnostics={'eps': shift}) from error
        return cho_solve(factor, residual.values[:, sol.index, :].T).T

    values = np.stack(sim.map_frequencies(per_frequency), axis=1)
    return ShotData(values, acq.frequencies)


def gn_modified_gradient(model: Model, acq: Acquisition, target: ShotData,
                         eps: Optional[float] = None, simulator: Optional[Simulator] = None,
                         with_hessian: bool = False) -> GradientBundle:
    """J^t Q^{-1} (S(m)b* - d); the misfit reported is the plain ½‖S(m)b* - d‖².

    ``eps`` defaults to 1e-2 times the mean diagonal of S S^H per frequency.
    """
    _check_data(target, acq, 'target')
    sim = _simulator(model, acq, simulator)
    predicted = sim.data()
    residual = predicted - target
    modified = apply_data_hessian_inverse(model, acq, residual, eps, sim)
    gradient = jacobian_transpose(model, acq, modified, sim)
    hessian = pseudo_hessian_diag(model, acq, sim) if with_hessian else None
    return GradientBundle(misfit=residual.half_norm_squared(), gradient=gradient,
                          hessian_diag=hessian, predicted=predicted)
