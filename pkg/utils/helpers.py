"""
Helper Functions
Location: jetnormals/utils/helpers.py

Utility functions used throughout the jetnormals package.
"""

import os
import tempfile
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from utils.exceptions import OutputWriteError

PathLike = Union[str, os.PathLike]

# Independent random streams derived from one user seed
STREAM_INIT = 0
STREAM_SHUFFLE = 1
STREAM_SUBSET = 2
STREAM_PATCHES = 3
STREAM_GRADCHECK = 4


def derive_rng(seed: int, stream: int) -> np.random.Generator:
    """Random generator for one named stream of a seed"""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))


def derive_seed(seed: int, stream: int) -> int:
    """Integer seed for one named stream (for libraries that want an int)"""
    state = np.random.SeedSequence([int(seed), int(stream)]).generate_state(1)
    return int(state[0])


def format_real(value: float) -> str:
    """Locale-independent decimal text with enough digits for a float64 round trip"""
    return repr(float(value))


def format_row(values: Iterable[float], digits: int = 10) -> str:
    """Space-separated row with a fixed number of significant digits"""
    return " ".join(f"{float(v):.{digits}g}" for v in values)


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text through a temporary sibling and rename it into place"""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    tmp_name = None
    try:
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise OutputWriteError(str(target), e.strerror or str(e))
    return target


def sibling_path(path: PathLike, suffix: str) -> Path:
    """Same stem, different extension"""
    return Path(path).with_suffix(suffix)
