"""Backend selection for the hot jet kernel.

The compiled extension (cubicform._kernel_cy) is preferred when importable;
otherwise the numpy implementation is used.  CUBICFORM_KERNEL=python|cython
forces the choice (cython raises if the extension is missing, so CI can pin
either path).
"""

import os

from . import _kernel_py

_forced = os.environ.get("CUBICFORM_KERNEL", "").strip().lower()

if _forced == "python":
    _impl = _kernel_py
elif _forced == "cython":
    from . import _kernel_cy as _impl  # noqa: F401  (ImportError is the point)
else:
    try:
        from . import _kernel_cy as _impl
    except ImportError:
        _impl = _kernel_py

BACKEND = _impl.BACKEND

mul = _impl.mul
compose = _impl.compose
invert = _impl.invert
monge = _impl.monge


def backends():
    """All importable backends, for parity tests and benchmarks."""
    found = {"python": _kernel_py}
    try:
        from . import _kernel_cy

        found["cython"] = _kernel_cy
    except ImportError:
        pass
    return found
