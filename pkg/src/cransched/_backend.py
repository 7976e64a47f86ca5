"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
kernels take over. ``use_backend`` switches explicitly (tests, benchmarks).
"""

from __future__ import annotations

import logging

import numpy as np

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None
    log.info("compiled kernels unavailable, using pure-Python fallback")

_active = _compiled if _compiled is not None else _pykernels


def kernels():
    """Return the active kernel module."""
    return _active


def backend_name() -> str:
    return "compiled" if _active is _compiled else "python"


def compiled_available() -> bool:
    return _compiled is not None


def use_backend(name: str) -> None:
    """Select ``"compiled"`` or ``"python"`` kernels for subsequent calls."""
    global _active
    if name == "python":
        _active = _pykernels
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels were not built; run `pip install -e .`")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def vertex_keys(n: int) -> np.ndarray:
    """Deterministic 64-bit hash keys, one per vertex, for set fingerprints."""
    keys = np.empty(n, dtype=np.uint64)
    for v in range(n):
        keys[v] = _pykernels.mix64(0x9E3779B97F4A7C15 * (v + 1))
    return keys
