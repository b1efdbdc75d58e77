"""
Core Validation Package
=======================

Run manifest schema and structure validation.
"""

from .schema_constants import ManifestSchema
from .manifest_validator import ManifestPositions, ManifestValidator

__all__ = [
    'ManifestSchema',
    'ManifestPositions',
    'ManifestValidator',
]
