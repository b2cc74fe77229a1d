"""Pick the simplex kernel: compiled extension if importable, else pure Python.

Set ``BNB_AUDITOR_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _simplex_py


def load(name: str | None = None):
    """Return ``(backend_name, run_simplex)`` for ``"cython"``, ``"python"`` or auto."""
    if name == "python":
        return "python", _simplex_py.run_simplex
    if name in (None, "cython"):
        try:
            from . import _simplex_core
        except ImportError:
            if name == "cython":
                raise
        else:
            return "cython", _simplex_core.run_simplex
    if name not in (None, "cython"):
        raise ValueError(f"unknown kernel {name!r}")
    return "python", _simplex_py.run_simplex


BACKEND, run_simplex = load("python" if os.environ.get("BNB_AUDITOR_PURE_PYTHON") else None)
