"""Selects the solver kernel at import time.

The compiled Cython kernel is preferred; the pure NumPy twin is the
fallback. EXOTIC_PURE_PYTHON=1 forces the fallback, which is also how the
kernel benchmark compares the two.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if _compiled is not None and os.environ.get("EXOTIC_PURE_PYTHON") != "1":
    active = _compiled
else:
    active = _kernels_py


def engine_name() -> str:
    return "compiled" if active.COMPILED else "pure-python"


def available_engines() -> dict:
    """Kernel modules importable in this installation, keyed by name."""
    out = {"pure-python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
