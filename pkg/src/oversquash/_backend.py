"""Kernel selection: the compiled extension when importable, else numpy.

Set ``OVERSQUASH_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _load_compiled() -> ModuleType | None:
    if os.environ.get("OVERSQUASH_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
kernels: ModuleType = _compiled if _compiled is not None else _fallback
NAME = "compiled" if _compiled is not None else "python"


def get(name: str) -> ModuleType:
    """Return the kernel module called ``name`` ("compiled" or "python")."""
    if name == "python":
        return _fallback
    if name == "compiled":
        if _compiled is None:
            from . import _kernels  # re-raise the real ImportError

            return _kernels
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
