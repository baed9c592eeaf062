"""Kernel backend selection.

The compiled extension (tulp._kernels, built from Cython) is used when
available; otherwise the pure NumPy fallback takes over.  Set the
environment variable TULP_PURE=1 to force the fallback.
"""

import os

from tulp import _kernels_py

try:
    from tulp import _kernels as _compiled
except ImportError:  # extension not built on this platform
    _compiled = None

if _compiled is not None and not os.environ.get("TULP_PURE"):
    _impl = _compiled
    BACKEND = "compiled"
else:
    _impl = _kernels_py
    BACKEND = "pure"

csr_matvec = _impl.csr_matvec
csc_rmatvec = _impl.csc_rmatvec
pdhg_step = _impl.pdhg_step
ray_scan = _impl.ray_scan


def available_backends():
    """Mapping of backend name to kernel module, for tests and benchmarks."""
    out = {"pure": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
