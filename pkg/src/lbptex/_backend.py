"""Selection between the compiled and pure-Python descriptor engines.

The compiled extension is preferred when importable; otherwise the numpy
implementation is used transparently.  ``LBPTEX_BACKEND`` forces the choice
(``compiled`` or ``python``) — useful for benchmarking and for verifying
that both engines agree.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

_ENV_VAR = "LBPTEX_BACKEND"


def load_backend(name: str | None = None) -> ModuleType:
    """Return the engine module for ``name`` (default: env var, then best)."""
    if name is None:
        name = os.environ.get(_ENV_VAR, "").strip() or None
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels  # raises ImportError if the extension is absent

        return _kernels
    if name is not None:
        raise ValueError(f"unknown backend {name!r} (expected 'compiled' or 'python')")
    try:
        from . import _kernels
    except ImportError:
        return _kernels_py
    return _kernels


backend = load_backend()


def backend_name() -> str:
    """Name of the engine selected at import time."""
    return backend.NAME
