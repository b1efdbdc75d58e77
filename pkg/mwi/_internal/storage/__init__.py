"""
Storage Components
==================

Binary model, shot data, checkpoint and graymap files.
"""

from .formats import (
    atomic_write, read_checkpoint, read_graymap, read_model, read_shot_data,
    write_checkpoint, write_graymap, write_model, write_shot_data,
)

__all__ = [
    'atomic_write', 'read_checkpoint', 'read_graymap', 'read_model', 'read_shot_data',
    'write_checkpoint', 'write_graymap', 'write_model', 'write_shot_data',
]
