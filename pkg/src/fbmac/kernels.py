"""Backend selection for the hot loops.

The compiled ``_speedups`` extension is used when it imports; otherwise the
numpy implementations in ``_fallback`` are used. Setting ``FBMAC_PURE_PYTHON=1``
forces the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

fallback = _fallback

if os.environ.get("FBMAC_PURE_PYTHON") == "1":
    compiled = None
else:
    try:
        from . import _speedups as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else _fallback
BACKEND = "cython" if compiled is not None else "python"

composition_sums = _impl.composition_sums
merge_sorted = _impl.merge_sorted
lattice_power = _impl.lattice_power
lattice_power_3d = _impl.lattice_power_3d
ml_error_masses = _impl.ml_error_masses


def backends() -> dict:
    """Available implementations keyed by name, for tests and benchmarks."""
    out = {"python": _fallback}
    if compiled is not None:
        out["cython"] = compiled
    return out
