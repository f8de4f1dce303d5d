"""Backend selection for the numerical kernels.

The Cython extension is preferred; the numpy implementation is used when the
extension is missing or ``VLCZF_PURE_PYTHON`` is set to a truthy value.
"""
import os

from . import _kernels_py

if os.environ.get("VLCZF_PURE_PYTHON", "").lower() in ("1", "true", "yes"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not compiled
        _impl = _kernels_py

BACKEND = _impl.BACKEND
capacity_nats = _impl.capacity_nats
max_extent = _impl.max_extent

__all__ = ["BACKEND", "capacity_nats", "max_extent", "_kernels_py"]
