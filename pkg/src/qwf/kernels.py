"""Kernel dispatch: the compiled extension when importable, else the pure-Python twins.

Set ``QWF_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"

if os.environ.get("QWF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback
    else:
        BACKEND = "compiled"
else:
    _impl = _fallback

bessel_jn_miller = _impl.bessel_jn_miller
rk4_hopping = _impl.rk4_hopping
airy_taylor = _impl.airy_taylor
miller_start = _impl.miller_start

__all__ = ["BACKEND", "bessel_jn_miller", "rk4_hopping", "airy_taylor", "miller_start"]
