"""Kernel backend selection.

The compiled Cython module is used when it was built at install time;
otherwise (or with ``SL2GRAPHS_PURE_PYTHON=1`` in the environment) the numpy
fallback is used.  Both expose the same functions.
"""

import os

from . import _fallback as fallback

compiled = None
if os.environ.get("SL2GRAPHS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

backend = compiled if compiled is not None else fallback
BACKEND = "cython" if compiled is not None else "numpy"

UNREACHED = 65535


def get(name: str | None = None):
    """Return a backend module by name ("cython", "numpy") or the default."""
    if name is None:
        return backend
    if name == "numpy":
        return fallback
    if name == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
