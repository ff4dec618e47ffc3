"""Kernel backend selection.

Hot loops are compiled with numba when it is importable. Setting the
environment variable ``MOLAUTH_DISABLE_NUMBA`` to anything other than
``""``/``"0"`` forces the pure-numpy path (read once, at import time).
"""

from __future__ import annotations

import os

ENV_FLAG = "MOLAUTH_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

NUMBA_DISABLED = os.environ.get(ENV_FLAG, "").strip() not in ("", "0")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity decorator otherwise.

    Compiles regardless of the env flag so benchmarks can compare both
    paths in one process; dispatch decides which one runs.
    """
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def default_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
