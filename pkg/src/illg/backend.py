"""Kernel backend selection.

The compiled Cython kernels are preferred; the pure-NumPy module is a
drop-in fallback.  Set ILLG_FORCE_PYTHON=1 to force the fallback (used by
the cross-backend equivalence tests and the benchmark).
"""

import os

if os.environ.get("ILLG_FORCE_PYTHON"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"


def get_kernels(force: str | None = None):
    """Return the kernel module, optionally overriding the default choice."""
    if force == "python":
        from . import _kernels_py
        return _kernels_py
    if force == "compiled":
        from . import _kernels_cy  # raises ImportError if not built
        return _kernels_cy
    return kernels
