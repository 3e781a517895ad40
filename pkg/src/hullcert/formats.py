"""Bit-exact binary formats and CSV ingestion.

FVEC: "FVEC" | u32 version=1 | u32 rows | u32 cols | rows*cols float32 LE,
      row-major.
LVEC: "LVEC" | u32 version=1 | u32 count | count int32 LE.
HUL1: "HUL1" | u32 version=1 | f64 epsilon LE | u32 rows | u32 cols |
      rows*cols float32 LE | u32 count | count u32 LE source row indices.

All integers little-endian. CSV values are parsed to the nearest float32
so CSV and FVEC inputs of the same data score identically; distances and
epsilon are always computed in float64 internally.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import IoFailure, MalformedFile, NonFiniteValue
from .geometry import HullApprox

FVEC_MAGIC = b"FVEC"
LVEC_MAGIC = b"LVEC"
HULL_MAGIC = b"HUL1"
FORMAT_VERSION = 1


def _read_bytes(path) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def _write_bytes(path, blob: bytes) -> None:
    try:
        with open(path, "wb") as f:
            f.write(blob)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def _check_finite(arr: np.ndarray, path) -> None:
    if not np.isfinite(arr).all():
        r, c = np.argwhere(~np.isfinite(np.atleast_2d(arr)))[0]
        raise NonFiniteValue(f"{path}: non-finite value at row {r}, column {c}")


def write_fvec(path, matrix) -> None:
    arr = np.asarray(matrix, dtype=np.float32)
    if arr.ndim != 2:
        raise MalformedFile(f"{path}: FVEC payload must be 2-D")
    _check_finite(arr, path)
    rows, cols = arr.shape
    header = FVEC_MAGIC + struct.pack("<III", FORMAT_VERSION, rows, cols)
    _write_bytes(path, header + arr.astype("<f4").tobytes(order="C"))


def read_fvec(path) -> np.ndarray:
    blob = _read_bytes(path)
    if len(blob) < 16 or blob[:4] != FVEC_MAGIC:
        raise MalformedFile(f"{path}: bad FVEC magic or truncated header")
    version, rows, cols = struct.unpack("<III", blob[4:16])
    if version != FORMAT_VERSION:
        raise MalformedFile(f"{path}: unsupported FVEC version {version}")
    expected = 16 + 4 * rows * cols
    if len(blob) != expected:
        raise MalformedFile(
            f"{path}: length {len(blob)} != expected {expected} "
            f"({rows}x{cols} float32)")
    arr = np.frombuffer(blob, dtype="<f4", offset=16).reshape(rows, cols)
    _check_finite(arr, path)
    return arr.astype(np.float64)


def write_lvec(path, labels) -> None:
    arr = np.asarray(labels).ravel()
    arr32 = arr.astype(np.int32)
    if not np.array_equal(arr32, arr):
        raise MalformedFile(f"{path}: labels do not fit int32")
    header = LVEC_MAGIC + struct.pack("<II", FORMAT_VERSION, arr32.size)
    _write_bytes(path, header + arr32.astype("<i4").tobytes())


def read_lvec(path) -> np.ndarray:
    blob = _read_bytes(path)
    if len(blob) < 12 or blob[:4] != LVEC_MAGIC:
        raise MalformedFile(f"{path}: bad LVEC magic or truncated header")
    version, count = struct.unpack("<II", blob[4:12])
    if version != FORMAT_VERSION:
        raise MalformedFile(f"{path}: unsupported LVEC version {version}")
    if len(blob) != 12 + 4 * count:
        raise MalformedFile(f"{path}: length {len(blob)} != expected {12 + 4 * count}")
    return np.frombuffer(blob, dtype="<i4", offset=12).astype(np.int64)


def write_hull(hull: HullApprox, path) -> None:
    pts = np.asarray(hull.points, dtype="<f4")
    _check_finite(pts, path)
    rows, cols = pts.shape
    src = np.asarray(hull.source_rows, dtype="<u4")
    blob = (HULL_MAGIC
            + struct.pack("<I", FORMAT_VERSION)
            + struct.pack("<d", hull.epsilon)
            + struct.pack("<II", rows, cols)
            + pts.tobytes(order="C")
            + struct.pack("<I", src.size)
            + src.tobytes())
    _write_bytes(path, blob)


def read_hull(path) -> HullApprox:
    blob = _read_bytes(path)
    head = 4 + 4 + 8 + 8
    if len(blob) < head or blob[:4] != HULL_MAGIC:
        raise MalformedFile(f"{path}: bad HUL1 magic or truncated header")
    (version,) = struct.unpack("<I", blob[4:8])
    if version != FORMAT_VERSION:
        raise MalformedFile(f"{path}: unsupported HUL1 version {version}")
    (epsilon,) = struct.unpack("<d", blob[8:16])
    rows, cols = struct.unpack("<II", blob[16:24])
    if epsilon <= 0 or not np.isfinite(epsilon):
        raise MalformedFile(f"{path}: epsilon must be finite and > 0, got {epsilon}")
    payload_end = 24 + 4 * rows * cols
    if len(blob) < payload_end + 4:
        raise MalformedFile(f"{path}: truncated point payload")
    pts = np.frombuffer(blob, dtype="<f4", offset=24,
                        count=rows * cols).reshape(rows, cols)
    _check_finite(pts, path)
    (count,) = struct.unpack("<I", blob[payload_end:payload_end + 4])
    if count != rows:
        raise MalformedFile(f"{path}: source index count {count} != rows {rows}")
    if len(blob) != payload_end + 4 + 4 * count:
        raise MalformedFile(f"{path}: truncated source index payload")
    src = np.frombuffer(blob, dtype="<u4", offset=payload_end + 4, count=count)
    return HullApprox(points=pts.astype(np.float64), epsilon=float(epsilon),
                      source_rows=[int(i) for i in src], build_stats=None)


def read_csv_matrix(path, header: bool = False) -> np.ndarray:
    """Comma-separated decimals, uniform column count, parsed to the
    nearest float32 for parity with FVEC payloads."""
    try:
        with open(path, "r") as f:
            lines = [ln.strip() for ln in f if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    if header:
        lines = lines[1:]
    if not lines:
        raise MalformedFile(f"{path}: no data rows")
    rows = []
    width = None
    for i, ln in enumerate(lines):
        fields = ln.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise MalformedFile(
                f"{path}: ragged row {i} ({len(fields)} columns, expected {width})")
        try:
            rows.append(np.array(fields, dtype=np.float32))
        except ValueError as exc:
            raise MalformedFile(f"{path}: row {i}: {exc}") from exc
    arr = np.vstack(rows)
    _check_finite(arr, path)
    return arr.astype(np.float64)


def read_matrix(path, format: str | None = None, header: bool = False) -> np.ndarray:
    """Dispatch on declared format, falling back to the file extension."""
    if format is None:
        format = "csv" if str(path).lower().endswith(".csv") else "fvec"
    if format == "fvec":
        return read_fvec(path)
    if format == "csv":
        return read_csv_matrix(path, header=header)
    raise MalformedFile(f"unknown matrix format {format!r}")


def write_scores_csv(path, scores, metric_name: str) -> None:
    """One value per line, single header line naming the metric."""
    arr = np.asarray(scores, dtype=np.float64).ravel()
    lines = [metric_name] + [f"{v:.9g}" for v in arr]
    try:
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def read_scores_csv(path) -> tuple[str, np.ndarray]:
    try:
        with open(path, "r") as f:
            lines = [ln.strip() for ln in f if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    if len(lines) < 2:
        raise MalformedFile(f"{path}: score file needs a header and data")
    name = lines[0]
    try:
        values = np.array(lines[1:], dtype=np.float64)
    except ValueError as exc:
        raise MalformedFile(f"{path}: {exc}") from exc
    return name, values


def atomic_replace(tmp_path, path) -> None:
    try:
        os.replace(tmp_path, path)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
