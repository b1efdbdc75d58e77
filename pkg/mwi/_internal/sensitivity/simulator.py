"""
Frequency-Domain Simulator
==========================

Forward wavefields of one model for every active frequency: assemble,
factorize once, solve all sources against the shared factors and sample
at the receivers. Solutions are cached so gradients, Jacobian actions and
Hessian diagonals at the same model reuse the factors.
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, TypeVar

import numpy as np

from ...core.config.system_config import SystemConfig
from ...core.exceptions import SolverError, ValidationError
from ...core.models import Acquisition, Model, ShotData
from ..helmholtz import Factorization, assemble, factorize, node_indices, source_terms

T = TypeVar('T')


@dataclass(frozen=True, eq=False)
class FrequencySolution:
    """Factors and forward fields (n_nodes x N_s) at one frequency."""
    index: int
    frequency: float
    factorization: Factorization
    fields: np.ndarray
    predicted: np.ndarray

    @property
    def omega(self) -> float:
        return self.factorization.omega

    @property
    def operator(self):
        return self.factorization.operator


class Simulator:
    """Cached forward solutions of one model over an acquisition."""

    def __init__(self, model: Model, acq: Acquisition,
                 pml_cells: int = SystemConfig.DEFAULT_PML_CELLS,
                 reflection: float = SystemConfig.PML_REFLECTION):
        if not acq.matches(model):
            raise ValidationError(
                f"Acquisition grid {acq.nx} x {acq.nz} (h={acq.h}) does not match model "
                f"grid {model.nx} x {model.nz} (h={model.h})",
                field='acquisition',
            )
        self.model = model
        self.acq = acq
        self.pml_cells = pml_cells
        self.reflection = reflection
        self.receiver_nodes = node_indices(acq.receivers, acq, pml_cells)
        self.logger = logging.getLogger('mwi.Simulator')
        self._solutions: Optional[List[FrequencySolution]] = None
        self._lock = threading.Lock()

    def _solve_frequency(self, index: int) -> FrequencySolution:
        frequency = self.acq.frequencies[index]
        op = assemble(self.model, 2.0 * math.pi * frequency, self.pml_cells, self.reflection)
        try:
            fac = factorize(op)
        except SolverError as e:
            # all sources share the factors; source 0 is the first left unsolved
            raise e.with_source(0) from e
        fields = fac.solve(source_terms(self.acq, frequency, self.pml_cells))
        bad = ~np.all(np.isfinite(fields), axis=0)
        if np.any(bad):
            raise SolverError("Non-finite wavefield", frequency=frequency,
                              source=int(np.argmax(bad)))
        predicted = fields[self.receiver_nodes, :].T
        return FrequencySolution(index=index, frequency=frequency, factorization=fac,
                                 fields=fields, predicted=predicted)

    def _pool(self, n_tasks: int) -> ThreadPoolExecutor:
        return ThreadPoolExecutor(max_workers=SystemConfig.worker_count(n_tasks))

    def solutions(self) -> List[FrequencySolution]:
        """Solutions for every frequency, in acquisition order."""
        with self._lock:
            if self._solutions is None:
                n = self.acq.n_frequencies
                with self._pool(n) as pool:
                    self._solutions = list(pool.map(self._solve_frequency, range(n)))
                self.logger.debug("Solved forward problems",
                                  extra={'frequencies': n, 'sources': self.acq.n_sources})
            return self._solutions

    def map_frequencies(self, func: Callable[[FrequencySolution], T]) -> List[T]:
        """Apply ``func`` to every frequency solution; results keep frequency order."""
        solutions = self.solutions()
        with self._pool(len(solutions)) as pool:
            return list(pool.map(func, solutions))

    def data(self) -> ShotData:
        """Predicted data S(m) b* as a (source, frequency, receiver) cube."""
        values = np.stack([sol.predicted for sol in self.solutions()], axis=1)
        return ShotData(values, self.acq.frequencies)


def forward_map(model: Model, acq: Acquisition,
                pml_cells: int = SystemConfig.DEFAULT_PML_CELLS) -> ShotData:
    """S(m) b*: data predicted by ``model`` for every source and frequency."""
    return Simulator(model, acq, pml_cells).data()
