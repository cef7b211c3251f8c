"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``CUTSCHED_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("CUTSCHED_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

hungarian = _impl.hungarian
accumulate_terms = _impl.accumulate_terms

__all__ = ["BACKEND", "hungarian", "accumulate_terms"]
