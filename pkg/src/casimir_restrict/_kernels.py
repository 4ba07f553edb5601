"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting CASIMIR_RESTRICT_PURE=1
forces the numpy fallback (useful for debugging and for comparing backends).
"""
import os

from . import _core_py

if os.environ.get("CASIMIR_RESTRICT_PURE", "") not in ("", "0"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _core_py

BACKEND = _impl.BACKEND
trig_series = _impl.trig_series
legendre_column = _impl.legendre_column
arc_integrals = _impl.arc_integrals
