"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the NumPy
fallback.  Set ``LGBEC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("LGBEC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

bose_head = _impl.bose_head
bose_direct = _impl.bose_direct
bose_direct_array = _impl.bose_direct_array
growth_series = _impl.growth_series
growth_series_fixed = _impl.growth_series_fixed
apply_hamiltonian = _impl.apply_hamiltonian


def backends():
    """Mapping of available backend name -> module."""
    out = {"python": _pykernels}
    try:
        from . import _kernels as compiled
    except ImportError:
        return out
    out["cython"] = compiled
    return out
