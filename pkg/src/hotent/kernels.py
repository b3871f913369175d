"""Back-end selection for the RK4 kernels.

The compiled extension :mod:`hotent._kernels` is used when it can be
imported; otherwise the pure-Python :mod:`hotent._kernels_py` is used.
Setting the environment variable ``HOTENT_PURE_PYTHON=1`` forces the
fallback (useful for debugging and for the agreement tests).
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("HOTENT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "compiled"

integrate_covariance = _impl.integrate_covariance
integrate_propagator = _impl.integrate_propagator
covariance_rhs = _impl.covariance_rhs
propagator_rhs = _impl.propagator_rhs


def get_backend(name=None):
    """Return a kernel module by name (``"compiled"`` or ``"python"``).

    ``None`` returns the module selected at import time.
    """
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError("unknown backend %r" % (name,))
