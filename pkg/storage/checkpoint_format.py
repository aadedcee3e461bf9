"""
Checkpoint File Format
Location: jetnormals/storage/checkpoint_format.py

Self-describing text checkpoints:

    # jetnormals checkpoint
    version = 1
    epoch = 12
    meta.order = 3            (network hyper-parameters)
    train.learning_rate = ... (training hyper-parameters)
    array <name> <dim> [<dim> ...]
    <values, one row of the last dimension per line>
    ...

Values are written with round-trip precision, so a loaded model
reproduces the saved one bit for bit.
"""

import logging
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from utils.exceptions import CheckpointError, InvalidInputError
from utils.helpers import PathLike, atomic_write_text, format_real

logger = logging.getLogger(__name__)

MAGIC = "# jetnormals checkpoint"
ARRAY_PREFIX = "array "


def write_checkpoint_file(path: PathLike, header: Dict[str, str], arrays: Dict[str, np.ndarray]) -> Path:
    """Header keys in the given order, then every array"""
    lines: List[str] = [MAGIC]
    for key, value in header.items():
        if "=" in key or "\n" in str(value):
            raise InvalidInputError(f"header entry {key!r} cannot be stored", "header")
        lines.append(f"{key} = {value}")

    for name, array in arrays.items():
        array = np.asarray(array, dtype=np.float64)
        shape = array.shape if array.ndim else (1,)
        lines.append(ARRAY_PREFIX + name + " " + " ".join(str(d) for d in shape))
        rows = array.reshape(-1, shape[-1])
        lines.extend(" ".join(format_real(v) for v in row) for row in rows)

    return atomic_write_text(path, "\n".join(lines) + "\n")


def read_checkpoint_file(path: PathLike) -> Tuple[Dict[str, str], Dict[str, np.ndarray]]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError("file not found", str(path))
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise CheckpointError("not a jetnormals checkpoint", str(path))

    header: Dict[str, str] = {}
    arrays: Dict[str, np.ndarray] = {}
    position = 1
    while position < len(lines):
        line = lines[position].strip()
        position += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith(ARRAY_PREFIX):
            name, array, position = _read_array(path, lines, line, position)
            if name in arrays:
                raise CheckpointError(f"line {position}: duplicate array {name}", str(path))
            arrays[name] = array
            continue
        if "=" not in line:
            raise CheckpointError(f"line {position}: expected 'key = value'", str(path))
        key, value = (part.strip() for part in line.split("=", 1))
        header[key] = value
    return header, arrays


def _read_array(path: Path, lines: List[str], declaration: str, position: int):
    fields = declaration.split()
    if len(fields) < 3:
        raise CheckpointError(f"line {position}: array declaration needs a name and a shape", str(path))
    name = fields[1]
    try:
        shape = tuple(int(d) for d in fields[2:])
    except ValueError:
        raise CheckpointError(f"line {position}: bad shape in {declaration!r}", str(path))
    row_length = shape[-1]
    row_count = int(np.prod(shape[:-1])) if len(shape) > 1 else 1

    if position + row_count > len(lines):
        raise CheckpointError(f"array {name} is truncated", str(path))
    try:
        rows = [[float(v) for v in lines[position + i].split()] for i in range(row_count)]
    except ValueError:
        raise CheckpointError(f"array {name}: non-numeric value", str(path))
    if any(len(row) != row_length for row in rows):
        raise CheckpointError(f"array {name}: rows must hold {row_length} values", str(path))
    return name, np.array(rows, dtype=np.float64).reshape(shape), position + row_count
