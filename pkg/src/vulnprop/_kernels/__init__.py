"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set VULNPROP_PURE_KERNELS=1 to force the pure backend (used by the
benchmark and by backend-parity tests).
"""

import os

if os.environ.get("VULNPROP_PURE_KERNELS", "") not in ("", "0"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _native as _impl

        BACKEND = "native"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

MODE_EXACT = _impl.MODE_EXACT
MODE_LINEARIZED = _impl.MODE_LINEARIZED
exponents = _impl.exponents
sweep = _impl.sweep
fixed_point = _impl.fixed_point
newton_system = _impl.newton_system

__all__ = [
    "BACKEND",
    "MODE_EXACT",
    "MODE_LINEARIZED",
    "exponents",
    "sweep",
    "fixed_point",
    "newton_system",
]
