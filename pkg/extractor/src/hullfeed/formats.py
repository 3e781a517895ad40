"""Writers (and readers for round trips) for the FVEC/LVEC wire formats.

FVEC: "FVEC" | u32 version=1 | u32 rows | u32 cols | rows*cols float32 LE,
      row-major.
LVEC: "LVEC" | u32 version=1 | u32 count | count int32 LE.

All integers little-endian. Payloads are single precision by format
contract. Files are written atomically: the payload goes to a temporary
file in the target directory which is then renamed over the destination.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import DataError

FVEC_MAGIC = b"FVEC"
LVEC_MAGIC = b"LVEC"
FORMAT_VERSION = 1


def _atomic_write(path, blob: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(blob)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_fvec(path, matrix) -> None:
    arr = np.asarray(matrix, dtype=np.float32)
    if arr.ndim != 2:
        raise DataError(f"{path}: FVEC payload must be 2-D, got {arr.ndim}-D")
    if not np.isfinite(arr).all():
        raise DataError(f"{path}: refusing to write non-finite values")
    rows, cols = arr.shape
    header = FVEC_MAGIC + struct.pack("<III", FORMAT_VERSION, rows, cols)
    _atomic_write(path, header + arr.astype("<f4").tobytes(order="C"))


def read_fvec(path) -> np.ndarray:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 16 or blob[:4] != FVEC_MAGIC:
        raise DataError(f"{path}: bad FVEC magic or truncated header")
    version, rows, cols = struct.unpack("<III", blob[4:16])
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported FVEC version {version}")
    if len(blob) != 16 + 4 * rows * cols:
        raise DataError(f"{path}: truncated FVEC payload")
    return np.frombuffer(blob, dtype="<f4", offset=16).reshape(rows, cols).copy()


def write_lvec(path, labels) -> None:
    arr = np.asarray(labels).ravel()
    arr32 = arr.astype(np.int32)
    if not np.array_equal(arr32, arr):
        raise DataError(f"{path}: labels do not fit int32")
    header = LVEC_MAGIC + struct.pack("<II", FORMAT_VERSION, arr32.size)
    _atomic_write(path, header + arr32.astype("<i4").tobytes())


def read_lvec(path) -> np.ndarray:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 12 or blob[:4] != LVEC_MAGIC:
        raise DataError(f"{path}: bad LVEC magic or truncated header")
    version, count = struct.unpack("<II", blob[4:12])
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported LVEC version {version}")
    if len(blob) != 12 + 4 * count:
        raise DataError(f"{path}: truncated LVEC payload")
    return np.frombuffer(blob, dtype="<i4", offset=12).astype(np.int64)
