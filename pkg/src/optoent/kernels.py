"""Backend selection for the numerical kernels.

The compiled extension is used when it imports; set ``OPTOENT_PURE_PYTHON=1``
to force the NumPy fallback. ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels

if os.environ.get("OPTOENT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

kron_lyapunov_solve = _impl.kron_lyapunov_solve
theta_minus_parts = _impl.theta_minus_parts
integrate_lyapunov_ode = _impl.integrate_lyapunov_ode


def backends():
    """Map of every importable backend name to its module."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
