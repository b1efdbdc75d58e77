"""
Manifest Structure Validator
============================

Validates a composed manifest document section by section, collecting
every problem with its line number before anything is applied.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import yaml

from ..exceptions import ErrorCollector, ManifestError
from .schema_constants import ManifestSchema


@dataclass
class ManifestPositions:
    """1-based line numbers of sections and keys."""
    sections: Dict[str, int] = field(default_factory=dict)
    keys: Dict[Tuple[str, str], int] = field(default_factory=dict)

    def line(self, section: str, key: Optional[str] = None) -> Optional[int]:
        if key is not None and (section, key) in self.keys:
            return self.keys[(section, key)]
        return self.sections.get(section)

    @classmethod
    def from_node(cls, root: Optional[yaml.Node]) -> 'ManifestPositions':
        positions = cls()
        if not isinstance(root, yaml.MappingNode):
            return positions
        for key_node, value_node in root.value:
            section = key_node.value
            positions.sections[section] = key_node.start_mark.line + 1
            if isinstance(value_node, yaml.MappingNode):
                for inner_key, _ in value_node.value:
                    positions.keys[(section, inner_key.value)] = inner_key.start_mark.line + 1
        return positions


class ManifestValidator:
    """Validates manifest sections, keys and value types."""

    def __init__(self):
        self._schema = ManifestSchema()

    def validate(self, document: Any, positions: ManifestPositions,
                 collector: ErrorCollector) -> None:
        """Record every structural problem of ``document`` in ``collector``."""
        if not isinstance(document, dict):
            collector.add_error(ManifestError(
                f"Manifest root must be a mapping of sections, got {type(document).__name__}",
                line=1,
            ))
            return

        for section in sorted(self._schema.REQUIRED_SECTIONS - set(document)):
            collector.add_error(ManifestError(f"Missing required section '{section}'",
                                              line=1, section=section))

        for section, body in document.items():
            line = positions.line(section)
            if section not in self._schema.SECTIONS:
                collector.add_error(ManifestError(
                    f"Unknown section '{section}'. Allowed sections are: "
                    f"{sorted(self._schema.SECTIONS)}",
                    line=line, section=str(section),
                ))
                continue
            if body is None:
                body = {}
            if not isinstance(body, dict):
                collector.add_error(ManifestError(
                    f"Section '{section}' must be a mapping of keys, got {type(body).__name__}",
                    line=line, section=section,
                ))
                continue
            self._validate_section(section, body, positions, collector)

        if not collector.has_errors():
            self._validate_relations(document, positions, collector)

    def _validate_section(self, section: str, body: Dict[str, Any],
                          positions: ManifestPositions, collector: ErrorCollector) -> None:
        required = self._schema.REQUIRED_KEYS.get(section, frozenset())
        for key in sorted(required - set(body)):
            collector.add_error(ManifestError(f"Missing required key '{section}.{key}'",
                                              line=positions.line(section), section=section, key=key))

        validators = self._schema.FIELD_TYPE_VALIDATORS[section]
        for key, value in body.items():
            line = positions.line(section, key)
            if key not in validators:
                collector.add_error(ManifestError(
                    f"Unknown key '{key}' in section '{section}'. Allowed keys are: "
                    f"{sorted(self._schema.allowed_keys(section))}",
                    line=line, section=section, key=str(key),
                ))
            elif not validators[key](value):
                collector.add_error(ManifestError(
                    f"Key '{section}.{key}' has invalid value {value!r}. "
                    f"Expected {self._schema.get_expected_type_description(key)}",
                    line=line, section=section, key=key, value=value,
                ))

    def _validate_relations(self, document: Dict[str, Any], positions: ManifestPositions,
                            collector: ErrorCollector) -> None:
        experiment = document.get('experiment') or {}

        def conflict(a: str, b: str) -> None:
            if a in experiment and b in experiment:
                collector.add_error(ManifestError(
                    f"Keys 'experiment.{a}' and 'experiment.{b}' are mutually exclusive",
                    line=positions.line('experiment', b), section='experiment', key=b,
                ))

        conflict('truth_model', 'truth_generator')
        conflict('initial_model', 'initial_velocity')

        if 'truth_generator' in experiment and 'h' not in experiment:
            collector.add_error(ManifestError(
                "Key 'experiment.truth_generator' needs 'experiment.h'",
                line=positions.line('experiment', 'truth_generator'), section='experiment', key='h',
            ))
        has_truth = 'truth_model' in experiment or 'truth_generator' in experiment
        if not has_truth and 'initial_model' not in experiment:
            collector.add_error(ManifestError(
                "Manifest defines no model grid: give a truth model, a truth generator "
                "or an initial model",
                line=positions.line('experiment'), section='experiment',
            ))
        if not has_truth and 'observed_data' not in experiment:
            collector.add_error(ManifestError(
                "Observed data need either 'experiment.observed_data' or a truth model",
                line=positions.line('experiment'), section='experiment',
            ))
        if experiment.get('v_min', 0) and experiment.get('v_max', 0) \
                and experiment['v_min'] > experiment['v_max']:
            collector.add_error(ManifestError(
                "experiment.v_min exceeds experiment.v_max",
                line=positions.line('experiment', 'v_min'), section='experiment', key='v_min',
            ))

        inversion = document.get('inversion') or {}
        if 'schedule' in inversion and 'frequencies' in inversion:
            collector.add_error(ManifestError(
                "Keys 'inversion.schedule' and 'inversion.frequencies' are mutually exclusive",
                line=positions.line('inversion', 'schedule'), section='inversion', key='schedule',
            ))
