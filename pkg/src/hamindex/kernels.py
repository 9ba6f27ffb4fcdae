"""Kernel dispatch: the compiled extension when importable, NumPy otherwise.

Set ``HAMINDEX_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
if os.environ.get("HAMINDEX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

collocation_propagate = _impl.collocation_propagate
max_symplectic_defect = _impl.max_symplectic_defect

__all__ = ["BACKEND", "collocation_propagate", "max_symplectic_defect"]
