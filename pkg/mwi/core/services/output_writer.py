"""
Run Output Emission
===================

Writes the files of a run: model snapshots and the final model, the
convergence CSV, per-source shot gathers and graymap renderings.
"""

import csv
import io
import logging
from pathlib import Path
from typing import List, Optional, Sequence

from ..config.system_config import SystemConfig
from ..exceptions import ValidationError
from ..models import Acquisition, InversionState, IterationRecord, Model, ShotData
from ..._internal.sensitivity import forward_map
from ..._internal.storage import atomic_write, write_graymap, write_model, write_shot_data

CSV_COLUMNS = ('iter', 'E_true', 'E_multiplier', 'grad_norm', 'model_rmse')


def format_log_csv(log: Sequence[IterationRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for record in log:
        writer.writerow([
            record.iteration,
            repr(record.e_true),
            repr(record.e_multiplier),
            repr(record.grad_norm),
            '' if record.model_rmse is None else repr(record.model_rmse),
        ])
    return buffer.getvalue()


def write_log_csv(path: Path, log: Sequence[IterationRecord]) -> Path:
    with atomic_write(path) as stream:
        stream.write(format_log_csv(log).encode(SystemConfig.DEFAULT_ENCODING))
    return Path(path)


class OutputWriter:
    """Emits run files into one output directory."""

    def __init__(self, directory: Path, snapshot_every: int = 0,
                 gather_sources: Sequence[int] = (0,), graymaps: bool = True):
        self.directory = Path(directory)
        self.snapshot_every = snapshot_every
        self.gather_sources = tuple(gather_sources)
        self.graymaps = graymaps
        self.logger = logging.getLogger('mwi.OutputWriter')

    @classmethod
    def for_manifest(cls, manifest) -> 'OutputWriter':
        spec = manifest.output
        return cls(spec.directory, spec.snapshot_every, spec.gather_sources, spec.graymaps)

    def write_model(self, stem: str, model: Model) -> List[Path]:
        written = [write_model(self.directory / f"{stem}.bin", model)]
        if self.graymaps:
            written.append(write_graymap(self.directory / f"{stem}.pgm", model.velocity))
        return written

    def snapshot(self, state: InversionState) -> None:
        """Iteration callback: write the model every ``snapshot_every`` iterations."""
        if self.snapshot_every and state.k % self.snapshot_every == 0:
            self.write_model(f"model_{state.k:04d}", state.model)

    def write_gathers(self, data: ShotData, prefix: str) -> List[Path]:
        written = []
        for source in self.gather_sources:
            if not 0 <= source < data.shape[0]:
                raise ValidationError(f"Gather source {source} outside 0..{data.shape[0] - 1}",
                                      field='gather_sources', value=source)
            gather = ShotData(data.values[source:source + 1], data.frequencies, data.wavelet_applied)
            written.append(write_shot_data(self.directory / f"{prefix}_src{source:03d}.bin", gather))
        return written

    def emit(self, state: InversionState, acq: Optional[Acquisition] = None,
             observed: Optional[ShotData] = None, truth: Optional[Model] = None,
             pml_cells: int = SystemConfig.DEFAULT_PML_CELLS) -> List[Path]:
        """Final model, convergence log and (when given) gathers and truth rendering."""
        written = self.write_model('model_final', state.model)
        written.append(write_log_csv(self.directory / 'convergence.csv', state.log))
        if truth is not None:
            written.extend(self.write_model('model_true', truth))
        if acq is not None:
            predicted = forward_map(state.model, acq, pml_cells)
            written.extend(self.write_gathers(predicted, 'predicted'))
        if observed is not None:
            written.extend(self.write_gathers(observed, 'observed'))
        self.logger.info(f"Wrote {len(written)} files to {self.directory}")
        return written


def emit_outputs(state: InversionState, manifest, acq: Optional[Acquisition] = None,
                 observed: Optional[ShotData] = None, truth: Optional[Model] = None) -> List[Path]:
    """Write the files of a finished (or checkpointed) run described by ``manifest``."""
    return OutputWriter.for_manifest(manifest).emit(state, acq, observed, truth,
                                                   manifest.run.pml_cells)
