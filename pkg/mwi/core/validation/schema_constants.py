"""
Manifest Schema Constants
=========================

Sections, keys, per-key type validators and type descriptions of a run
manifest.
"""

from typing import Any, Callable, Dict, FrozenSet

from ..config.run_config import METHODS
from ..models import REGULARIZER_KINDS


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_positive(x: Any) -> bool:
    return _is_number(x) and x > 0


def _is_non_negative(x: Any) -> bool:
    return _is_number(x) and x >= 0


def _is_count(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 0


def _is_positive_count(x: Any) -> bool:
    return _is_count(x) and x > 0


def _is_text(x: Any) -> bool:
    return isinstance(x, str) and bool(x.strip())


def _is_frequency_list(x: Any) -> bool:
    return isinstance(x, list) and bool(x) and all(_is_positive(f) for f in x)


def _is_schedule(x: Any) -> bool:
    return isinstance(x, list) and bool(x) and all(_is_frequency_list(stage) for stage in x)


def _is_index_list(x: Any) -> bool:
    return isinstance(x, list) and all(_is_count(i) for i in x)


def _one_of(*choices: str) -> Callable[[Any], bool]:
    return lambda x: x in choices


class ManifestSchema:
    """Centralized manifest schema constants."""

    SECTIONS: FrozenSet[str] = frozenset({
        'experiment',   # models and input files
        'acquisition',  # source/receiver lines and wavelet
        'inversion',    # Required: method and loop settings
        'regularizer',  # prox choice
        'output',       # emitted files
    })

    REQUIRED_SECTIONS: FrozenSet[str] = frozenset({'inversion'})

    REQUIRED_KEYS: Dict[str, FrozenSet[str]] = {
        'inversion': frozenset({'method'}),
    }

    # Keys holding input paths; resolved against the manifest directory
    PATH_KEYS: Dict[str, FrozenSet[str]] = {
        'experiment': frozenset({'truth_model', 'initial_model', 'observed_data'}),
    }

    SIDES = ('top', 'bottom', 'left', 'right')
    TRUTH_GENERATORS = ('camembert', 'two-layer')

    FIELD_TYPE_VALIDATORS: Dict[str, Dict[str, Callable[[Any], bool]]] = {
        'experiment': {
            'name': _is_text,
            'truth_model': _is_text,
            'truth_generator': _one_of(*TRUTH_GENERATORS),
            'h': _is_positive,
            'diameter_fraction': _is_positive,
            'initial_model': _is_text,
            'initial_velocity': _is_positive,
            'v_min': _is_positive,
            'v_max': _is_positive,
            'observed_data': _is_text,
        },
        'acquisition': {
            'n_sources': _is_positive_count,
            'source_side': _one_of(*SIDES),
            'n_receivers': _is_positive_count,
            'receiver_side': _one_of(*SIDES),
            'standoff': _is_count,
            'peak_frequency': _is_positive,
            'frequencies': _is_frequency_list,
            'frequency_count': _is_positive_count,
            'amplitude': _is_positive,
        },
        'inversion': {
            'method': _one_of(*METHODS),
            'mu': _is_positive,
            'iterations': _is_count,
            'frequencies': _is_frequency_list,
            'bounds': lambda x: isinstance(x, bool),
            'gn_data_hessian': lambda x: isinstance(x, bool),
            'gn_eps': _is_positive,
            'step_fraction': lambda x: _is_positive(x) and x <= 1,
            'step_length': _is_positive,
            'pseudo_hessian_beta': _is_positive,
            'pml_cells': _is_positive_count,
            'schedule': _is_schedule,
            'cycles': _is_positive_count,
        },
        'regularizer': {
            'kind': _one_of(*REGULARIZER_KINDS),
            'weight': _is_non_negative,
            'tv_inner_iters': _is_positive_count,
            'tv_tolerance': _is_positive,
        },
        'output': {
            'directory': _is_text,
            'snapshot_every': _is_count,
            'gather_sources': _is_index_list,
            'graymaps': lambda x: isinstance(x, bool),
            'checkpoint': lambda x: isinstance(x, bool),
        },
    }

    TYPE_DESCRIPTIONS: Dict[str, str] = {
        'name': 'non-empty string',
        'truth_model': 'path string',
        'truth_generator': f"one of {TRUTH_GENERATORS}",
        'h': 'positive number (meters)',
        'diameter_fraction': 'positive number',
        'initial_model': 'path string',
        'initial_velocity': 'positive number (m/s)',
        'v_min': 'positive number (m/s)',
        'v_max': 'positive number (m/s)',
        'observed_data': 'path string',
        'n_sources': 'positive integer',
        'source_side': f"one of {SIDES}",
        'n_receivers': 'positive integer',
        'receiver_side': f"one of {SIDES}",
        'standoff': 'non-negative integer (cells)',
        'peak_frequency': 'positive number (Hz)',
        'frequencies': 'nonempty list of positive numbers (Hz)',
        'frequency_count': 'positive integer',
        'amplitude': 'positive number',
        'method': f"one of {METHODS}",
        'mu': 'positive number',
        'iterations': 'non-negative integer',
        'bounds': 'boolean',
        'gn_data_hessian': 'boolean',
        'gn_eps': 'positive number',
        'step_fraction': 'number in (0, 1]',
        'step_length': 'positive number',
        'pseudo_hessian_beta': 'positive number',
        'pml_cells': 'positive integer',
        'schedule': 'nonempty list of frequency lists',
        'cycles': 'positive integer',
        'kind': f"one of {REGULARIZER_KINDS}",
        'weight': 'non-negative number',
        'tv_inner_iters': 'positive integer',
        'tv_tolerance': 'positive number',
        'directory': 'path string',
        'snapshot_every': 'non-negative integer',
        'gather_sources': 'list of source indices',
        'graymaps': 'boolean',
        'checkpoint': 'boolean',
    }

    @classmethod
    def allowed_keys(cls, section: str) -> FrozenSet[str]:
        return frozenset(cls.FIELD_TYPE_VALIDATORS.get(section, {}))

    @classmethod
    def get_expected_type_description(cls, key: str) -> str:
        """Get human-readable type description for a key."""
        return cls.TYPE_DESCRIPTIONS.get(key, 'unknown type')
