"""Deterministic JSON report serialization.

Reports always carry the tool version, SHA-256 digests of the input
files, and the seed (null when no randomness was involved). Floats are
rounded to 9 significant digits; non-finite values (e.g. the DSA
degenerate-denominator sentinel) are refused rather than serialized.
Missing fields serialize as explicit nulls, never omitted keys.
"""

from __future__ import annotations

import hashlib
import json
import math

from .errors import IoFailure, NonFiniteValue

TOOL_VERSION = "0.1.0"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _normalize(value, key=""):
    if value is None or isinstance(value, (bool, str, int)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise NonFiniteValue(
                f"refusing to serialize non-finite value for {key or 'field'}")
        return float(f"{value:.9g}")
    if isinstance(value, dict):
        return {str(k): _normalize(v, str(k)) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v, key) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return _normalize(value.item(), key)
    if hasattr(value, "tolist"):  # numpy array
        return _normalize(value.tolist(), key)
    raise TypeError(f"cannot serialize {type(value).__name__} for {key or 'field'}")


def make_report(kind: str, payload: dict, inputs: dict | None = None,
                seed: int | None = None) -> dict:
    return {
        "kind": kind,
        "tool_version": TOOL_VERSION,
        "seed": seed,
        "inputs": {k: file_digest(v) for k, v in (inputs or {}).items()},
        "payload": payload,
    }


def render_report(report: dict) -> str:
    return json.dumps(_normalize(report), sort_keys=True, indent=2) + "\n"


def write_report(report: dict, path) -> None:
    text = render_report(report)
    try:
        with open(path, "w") as f:
            f.write(text)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
