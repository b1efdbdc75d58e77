"""
Binary File Formats
===================

Little-endian binary files with one-line text headers:

- model:  ``MWI-MODEL nx nz h`` then nz·nx float32 velocities (m/s), row-major
  from shallow to deep.
- data:   ``MWI-DATA ns nf nr``, ``FREQS f1 ... fnf`` then ns·nf·nr complex64.
- checkpoint directory: ``model.bin``, ``multipliers.bin`` and a
  ``checkpoint.txt`` sidecar of ``key=value`` lines.
- graymap: 8-bit binary PGM (P5) with a ``.range`` sidecar holding the
  min/max used for scaling.

Every writer goes through ``atomic_write``: the bytes land in a temporary
file next to the target and are moved into place only when complete.
"""

import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, BinaryIO, Dict, Iterator, Tuple, Union

import numpy as np

from ...core.config.system_config import SystemConfig
from ...core.exceptions import ValidationError
from ...core.models import InversionState, Model, ShotData

logger = logging.getLogger('mwi.Storage')

PathLike = Union[str, Path]

MODEL_DTYPE = np.dtype('<f4')
DATA_DTYPE = np.dtype('<c8')
CHECKPOINT_MODEL = 'model.bin'
CHECKPOINT_MULTIPLIERS = 'multipliers.bin'
RANGE_SUFFIX = '.range'


@contextmanager
def atomic_write(path: PathLike) -> Iterator[BinaryIO]:
    """Binary handle whose contents replace ``path`` only on success."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(dir=target.parent, prefix=f'.{target.name}.',
                                         suffix='.tmp', delete=False)
    try:
        with handle:
            yield handle
        os.replace(handle.name, target)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        logger.error("Write aborted, partial file removed", extra={'path': str(target)})
        raise


def _format_float(value: float) -> str:
    return f"{float(value):.17g}"


def _read_header(stream: BinaryIO, path: PathLike) -> str:
    line = stream.readline()
    if not line.endswith(b'\n'):
        raise ValidationError(f"Truncated header in {path}", field='path', value=str(path))
    try:
        return line.decode(SystemConfig.DEFAULT_ENCODING).strip()
    except UnicodeDecodeError:
        raise ValidationError(f"Header of {path} is not text", field='path', value=str(path))


def _read_payload(stream: BinaryIO, dtype: np.dtype, count: int, path: PathLike) -> np.ndarray:
    payload = stream.read()
    if len(payload) != count * dtype.itemsize:
        raise ValidationError(
            f"{path} holds {len(payload)} payload bytes, expected {count * dtype.itemsize}",
            field='path', value=str(path),
        )
    return np.frombuffer(payload, dtype=dtype)


def write_model(path: PathLike, model: Model) -> Path:
    """Write a model as float32 velocities."""
    header = f"{SystemConfig.MODEL_MAGIC} {model.nx} {model.nz} {_format_float(model.h)}\n"
    with atomic_write(path) as stream:
        stream.write(header.encode(SystemConfig.DEFAULT_ENCODING))
        stream.write(model.velocity.astype(MODEL_DTYPE).tobytes())
    return Path(path)


def read_model(path: PathLike) -> Model:
    """Read a model file; bounds default to the stored extremes."""
    with open(path, 'rb') as stream:
        parts = _read_header(stream, path).split()
        if len(parts) != 4 or parts[0] != SystemConfig.MODEL_MAGIC:
            raise ValidationError(f"{path} is not a model file", field='path', value=str(path))
        try:
            nx, nz, h = int(parts[1]), int(parts[2]), float(parts[3])
        except ValueError:
            raise ValidationError(f"Malformed model header in {path}", field='path', value=str(path))
        velocity = _read_payload(stream, MODEL_DTYPE, nx * nz, path).astype(np.float64)

    if not np.all(np.isfinite(velocity)) or np.any(velocity <= 0):
        raise ValidationError(f"{path} holds non-positive velocities", field='path', value=str(path))
    try:
        return Model(nx=nx, nz=nz, h=h, m=(1.0 / velocity ** 2).reshape(nz, nx))
    except ValueError as e:
        raise ValidationError(f"Invalid model in {path}: {e}", field='path', value=str(path))


def write_shot_data(path: PathLike, data: ShotData) -> Path:
    """Write a data cube as complex64 with its frequency labels."""
    ns, nf, nr = data.shape
    header = (f"{SystemConfig.DATA_MAGIC} {ns} {nf} {nr}\n"
              f"FREQS {' '.join(_format_float(f) for f in data.frequencies)}\n")
    with atomic_write(path) as stream:
        stream.write(header.encode(SystemConfig.DEFAULT_ENCODING))
        stream.write(data.values.astype(DATA_DTYPE).tobytes())
    return Path(path)


def read_shot_data(path: PathLike) -> ShotData:
    with open(path, 'rb') as stream:
        parts = _read_header(stream, path).split()
        if len(parts) != 4 or parts[0] != SystemConfig.DATA_MAGIC:
            raise ValidationError(f"{path} is not a data file", field='path', value=str(path))
        freq_parts = _read_header(stream, path).split()
        try:
            ns, nf, nr = (int(p) for p in parts[1:])
            if not freq_parts or freq_parts[0] != 'FREQS':
                raise ValueError("missing FREQS line")
            frequencies = tuple(float(f) for f in freq_parts[1:])
        except ValueError as e:
            raise ValidationError(f"Malformed data header in {path}: {e}",
                                  field='path', value=str(path))
        values = _read_payload(stream, DATA_DTYPE, ns * nf * nr, path)

    try:
        return ShotData(values.astype(np.complex128).reshape(ns, nf, nr), frequencies)
    except ValueError as e:
        raise ValidationError(f"Invalid data in {path}: {e}", field='path', value=str(path))


def write_checkpoint(directory: PathLike, state: InversionState, mu: float, method: str) -> Path:
    """Snapshot the model, multipliers and loop scalars of a run."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_model(directory / CHECKPOINT_MODEL, state.model)
    write_shot_data(directory / CHECKPOINT_MULTIPLIERS, state.multipliers)

    alpha = '' if state.alpha is None else _format_float(state.alpha)
    sidecar = f"k={state.k}\nalpha={alpha}\nmu={_format_float(mu)}\nmethod={method}\n"
    with atomic_write(directory / SystemConfig.CHECKPOINT_SIDECAR) as stream:
        stream.write(sidecar.encode(SystemConfig.DEFAULT_ENCODING))
    logger.info("Checkpoint written", extra={'path': str(directory), 'iteration': state.k})
    return directory


def read_checkpoint(directory: PathLike) -> Tuple[InversionState, Dict[str, Any]]:
    """State (without log) and the sidecar scalars ``mu`` and ``method``."""
    directory = Path(directory)
    sidecar = directory / SystemConfig.CHECKPOINT_SIDECAR
    try:
        lines = sidecar.read_text(encoding=SystemConfig.DEFAULT_ENCODING).splitlines()
    except FileNotFoundError:
        raise ValidationError(f"No checkpoint in {directory}", field='path', value=str(directory))

    entries = dict(line.split('=', 1) for line in lines if '=' in line)
    try:
        k = int(entries['k'])
        alpha = float(entries['alpha']) if entries.get('alpha') else None
        metadata = {'mu': float(entries['mu']), 'method': entries['method']}
    except (KeyError, ValueError) as e:
        raise ValidationError(f"Malformed checkpoint sidecar {sidecar}: {e}",
                              field='path', value=str(sidecar))

    state = InversionState(model=read_model(directory / CHECKPOINT_MODEL),
                           multipliers=read_shot_data(directory / CHECKPOINT_MULTIPLIERS),
                           k=k, alpha=alpha)
    return state, metadata


def write_graymap(path: PathLike, grid: np.ndarray) -> Path:
    """8-bit PGM of a 2D grid scaled linearly from its min (black) to max (white)."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2 or not np.all(np.isfinite(grid)):
        raise ValidationError("Graymap input must be a finite 2D grid", field='grid')

    low, high = float(grid.min()), float(grid.max())
    if high > low:
        pixels = np.rint(255.0 * (grid - low) / (high - low)).astype(np.uint8)
    else:
        pixels = np.zeros(grid.shape, dtype=np.uint8)

    nz, nx = grid.shape
    with atomic_write(path) as stream:
        stream.write(f"P5\n{nx} {nz}\n255\n".encode('ascii'))
        stream.write(pixels.tobytes())
    with atomic_write(f"{path}{RANGE_SUFFIX}") as stream:
        stream.write(f"min={_format_float(low)}\nmax={_format_float(high)}\n"
                     .encode(SystemConfig.DEFAULT_ENCODING))
    return Path(path)


def read_graymap(path: PathLike) -> np.ndarray:
    """Pixels of a P5 graymap written by ``write_graymap``."""
    with open(path, 'rb') as stream:
        if stream.readline().strip() != b'P5':
            raise ValidationError(f"{path} is not a binary graymap", field='path', value=str(path))
        nx, nz = (int(v) for v in stream.readline().split())
        stream.readline()
        pixels = _read_payload(stream, np.dtype(np.uint8), nx * nz, path)
    return pixels.reshape(nz, nx)
