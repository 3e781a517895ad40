"""Kernel backend selection.

The compiled Cython kernel is preferred; the pure-numpy fallback is used
when the extension is missing or when HULLCERT_BACKEND=python is set.
HULLCERT_THREADS caps worker parallelism for batch scoring (0/unset = all
cores).
"""

import os

from . import _kernels_py


def _select():
    forced = os.environ.get("HULLCERT_BACKEND", "").strip().lower()
    if forced == "python":
        return _kernels_py
    try:
        from . import _kernels  # compiled extension
        return _kernels
    except ImportError:
        if forced in ("cython", "compiled"):
            raise
        return _kernels_py


_impl = _select()

fw_project = _impl.fw_project
BACKEND_NAME = _impl.BACKEND_NAME


def thread_count():
    """Worker cap from HULLCERT_THREADS; 0 or unset means all cores."""
    raw = os.environ.get("HULLCERT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n
