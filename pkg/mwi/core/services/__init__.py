"""
Core Services Package
=====================

Model and acquisition builders, manifest loading and output emission.
The engine-driven services (``experiment``, ``diagnostics``) are imported
from their modules directly.
"""

from .model_builder import (
    RESAMPLE_FACTORS, grid_count, make_camembert, make_homogeneous, make_two_layer,
    model_rmse, project_bounds, resample_model, slowness_rmse,
)
from .acquisition_builder import build_acquisition, check_dispersion, ricker_band, side_positions
from .manifest_loader import AcquisitionSpec, ManifestLoader, OutputSpec, RunManifest, parse_manifest
from .output_writer import OutputWriter, emit_outputs, write_log_csv

__all__ = [
    'RESAMPLE_FACTORS', 'grid_count', 'make_camembert', 'make_homogeneous', 'make_two_layer',
    'model_rmse', 'project_bounds', 'resample_model', 'slowness_rmse',
    'build_acquisition', 'check_dispersion', 'ricker_band', 'side_positions',
    'AcquisitionSpec', 'ManifestLoader', 'OutputSpec', 'RunManifest', 'parse_manifest',
    'OutputWriter', 'emit_outputs', 'write_log_csv',
]
