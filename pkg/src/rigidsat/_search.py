"""Backend selection for the injection-search kernel.

The compiled module is used when it imports; set ``RIGIDSAT_PURE_PYTHON=1``
to force the fallback.  Matrices whose entries overflow a C ``long long``
go to the fallback.
"""

import os

from . import _pysearch

if os.environ.get("RIGIDSAT_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _csearch as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def extend_maps(pattern, host, pcolor, hcolor, order, fixed, limit=0, backend=None):
    """Dispatch to the selected kernel; see ``_pysearch.extend_maps``."""
    use = backend or BACKEND
    if use not in ("cython", "python"):
        raise ValueError(f"unknown backend {use!r}")
    if use == "cython" and _compiled is not None:
        try:
            return _compiled.extend_maps(pattern, host, pcolor, hcolor, order, fixed, limit)
        except OverflowError:
            pass
    return _pysearch.extend_maps(pattern, host, pcolor, hcolor, order, fixed, limit)
