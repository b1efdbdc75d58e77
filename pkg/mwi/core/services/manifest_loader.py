"""
Run Manifest Loading
====================

Parses YAML run manifests into a validated ``RunManifest``. A manifest has
the sections ``experiment``, ``acquisition``, ``inversion``,
``regularizer`` and ``output``; only ``inversion.method`` is required.
Parsing either yields a complete manifest with defaults applied or raises
one ``ManifestError`` listing every problem with its line.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from ..config.run_config import RunConfig
from ..config.system_config import SystemConfig
from ..exceptions import ErrorCollector, ManifestError
from ..models import Regularizer
from ..validation.manifest_validator import ManifestPositions, ManifestValidator
from ..validation.schema_constants import ManifestSchema

logger = logging.getLogger('mwi.ManifestLoader')


@dataclass(frozen=True)
class AcquisitionSpec:
    """Source/receiver lines and wavelet of a manifest."""
    n_sources: int = 1
    source_side: str = 'top'
    n_receivers: int = 1
    receiver_side: str = 'bottom'
    standoff: int = SystemConfig.DEFAULT_STANDOFF_CELLS
    peak_frequency: float = 10.0
    frequencies: Optional[Tuple[float, ...]] = None
    frequency_count: int = SystemConfig.DEFAULT_FREQUENCY_COUNT
    amplitude: float = 1.0


@dataclass(frozen=True)
class OutputSpec:
    directory: Path
    snapshot_every: int = 0
    gather_sources: Tuple[int, ...] = (0,)
    graymaps: bool = True
    checkpoint: bool = True


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one experiment."""
    name: str
    path: Optional[Path]
    run: RunConfig
    acquisition: AcquisitionSpec
    output: OutputSpec
    truth_model: Optional[Path] = None
    truth_generator: Optional[str] = None
    h: Optional[float] = None
    diameter_fraction: float = SystemConfig.CAMEMBERT_DIAMETER_FRACTION
    initial_model: Optional[Path] = None
    initial_velocity: Optional[float] = None
    v_min: Optional[float] = None
    v_max: Optional[float] = None
    observed_data: Optional[Path] = None
    schedule: Optional[Tuple[Tuple[float, ...], ...]] = None
    cycles: int = 1


class ManifestLoader:
    """Loads run manifests with strict schema validation."""

    def __init__(self):
        self.validator = ManifestValidator()

    def from_file(self, path: Union[str, Path]) -> RunManifest:
        path = Path(path)
        try:
            text = path.read_text(encoding=SystemConfig.DEFAULT_ENCODING)
        except FileNotFoundError:
            raise ManifestError(f"Manifest not found: {path}")
        except OSError as e:
            raise ManifestError(f"Error reading manifest {path}: {e}")
        return self.from_yaml(text, base_dir=path.parent, name=path.stem, path=path)

    def from_yaml(self, text: str, base_dir: Union[str, Path] = '.', name: str = 'experiment',
                  path: Optional[Path] = None) -> RunManifest:
        """Parse manifest text; relative paths resolve against ``base_dir``."""
        if not text or not text.strip():
            raise ManifestError("Manifest is empty", line=1)
        try:
            root = yaml.compose(text, Loader=yaml.SafeLoader)
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            raise ManifestError(f"Invalid YAML syntax: {e}",
                                line=mark.line + 1 if mark is not None else None)

        collector = ErrorCollector()
        positions = ManifestPositions.from_node(root)
        self.validator.validate(document, positions, collector)
        collector.raise_if_errors("Invalid manifest")

        sections = {s: (document.get(s) or {}) for s in ManifestSchema.SECTIONS}
        base_dir = Path(base_dir)
        name = sections['experiment'].get('name', name)
        paths = self._resolve_paths(sections['experiment'], base_dir, positions, collector)
        run = self._build_run_config(sections['inversion'], sections['regularizer'],
                                     positions, collector)
        output = self._build_output(sections['output'], base_dir, name, collector, positions)
        collector.raise_if_errors("Invalid manifest")
        if output.checkpoint:
            run = replace(run, checkpoint_dir=output.directory / 'checkpoint')

        experiment = sections['experiment']
        inversion = sections['inversion']
        acquisition = sections['acquisition']
        if 'frequencies' in acquisition:
            acquisition = dict(acquisition, frequencies=tuple(float(f) for f in acquisition['frequencies']))
        schedule = inversion.get('schedule')

        manifest = RunManifest(
            name=name,
            path=path,
            run=run,
            acquisition=AcquisitionSpec(**acquisition),
            output=output,
            truth_generator=experiment.get('truth_generator'),
            h=experiment.get('h'),
            diameter_fraction=experiment.get('diameter_fraction',
                                             SystemConfig.CAMEMBERT_DIAMETER_FRACTION),
            initial_velocity=experiment.get('initial_velocity'),
            v_min=experiment.get('v_min'),
            v_max=experiment.get('v_max'),
            schedule=None if schedule is None else tuple(
                tuple(float(f) for f in stage) for stage in schedule),
            cycles=inversion.get('cycles', 1),
            **paths,
        )
        logger.info(f"Loaded manifest '{manifest.name}'",
                    extra={'method': run.method, 'iterations': run.iterations})
        return manifest

    def _resolve_paths(self, experiment: Dict[str, Any], base_dir: Path,
                       positions: ManifestPositions, collector: ErrorCollector) -> Dict[str, Path]:
        resolved = {}
        for key in sorted(ManifestSchema.PATH_KEYS['experiment'] & set(experiment)):
            candidate = Path(experiment[key])
            if not candidate.is_absolute():
                candidate = base_dir / candidate
            if not candidate.exists():
                collector.add_error(ManifestError(
                    f"Input path for 'experiment.{key}' does not exist: {candidate}",
                    line=positions.line('experiment', key), section='experiment', key=key,
                    value=experiment[key],
                ))
            resolved[key] = candidate
        return resolved

    def _build_run_config(self, inversion: Dict[str, Any], regularizer: Dict[str, Any],
                          positions: ManifestPositions,
                          collector: ErrorCollector) -> Optional[RunConfig]:
        try:
            reg = Regularizer(**regularizer)
        except ValueError as e:
            collector.add_error(ManifestError(str(e), line=positions.line('regularizer'),
                                              section='regularizer'))
            return None

        settings = {k: v for k, v in inversion.items() if k not in ('schedule', 'cycles')}
        if 'frequencies' in settings:
            settings['frequencies'] = tuple(settings['frequencies'])
        try:
            return RunConfig(regularizer=reg, **settings)
        except ValueError as e:
            collector.add_error(ManifestError(str(e), line=positions.line('inversion'),
                                              section='inversion'))
            return None

    def _build_output(self, output: Dict[str, Any], base_dir: Path, name: str,
                      collector: ErrorCollector, positions: ManifestPositions) -> Optional[OutputSpec]:
        directory = Path(output.get('directory', Path('runs') / name))
        if not directory.is_absolute():
            directory = base_dir / directory
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            collector.add_error(ManifestError(
                f"Output directory cannot be created: {directory} ({e})",
                line=positions.line('output', 'directory'), section='output', key='directory',
            ))
            return None
        return OutputSpec(
            directory=directory,
            snapshot_every=output.get('snapshot_every', 0),
            gather_sources=tuple(output.get('gather_sources', (0,))),
            graymaps=output.get('graymaps', True),
            checkpoint=output.get('checkpoint', True),
        )


def parse_manifest(path: Union[str, Path]) -> RunManifest:
    """Load and validate a run manifest file."""
    return ManifestLoader().from_file(path)
