"""Kernel selection: compiled extension when available, pure Python otherwise.

Set SPECSING_BACKEND=python to force the fallback (e.g. for benchmarking) or
SPECSING_BACKEND=cython to fail loudly if the extension is missing.
"""
from __future__ import annotations

import os

_requested = os.environ.get("SPECSING_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "cython"):
    try:
        from . import _shoot as _impl
    except ImportError:
        if _requested == "cython":
            raise
        from . import _shoot_py as _impl
elif _requested == "python":
    from . import _shoot_py as _impl
else:
    raise RuntimeError(
        f"SPECSING_BACKEND must be 'auto', 'cython' or 'python', got {_requested!r}")

rk4_shoot = _impl.rk4_shoot
BACKEND_NAME: str = _impl.BACKEND_NAME


def backend_name() -> str:
    """Name of the active shooting kernel: 'cython' or 'python'."""
    return BACKEND_NAME
