"""Backend selection for the hot kernels.

The compiled extension is preferred; set ``FRACHARM_PURE_PYTHON=1`` to force
the fallback (the benchmark and the backend-agreement tests do this per call
through :func:`get_backend`).
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name is None:
        name = BACKEND
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    if name == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


if _compiled is not None and os.environ.get("FRACHARM_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_active = get_backend(BACKEND)
farthest_point_sampling = _active.farthest_point_sampling
clipped_cell_areas = _active.clipped_cell_areas
