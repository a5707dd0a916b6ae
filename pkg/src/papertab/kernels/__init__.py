"""Backend selection for the per-frame hot kernels.

The compiled extension is preferred when built; the NumPy fallback is
selected otherwise. ``PAPERTAB_KERNELS=python`` forces the fallback and
``PAPERTAB_KERNELS=c`` makes a missing extension a hard error (useful for
benchmarks and CI). Both backends are bit-identical by contract.
"""

import os

from . import pyback

_requested = os.environ.get("PAPERTAB_KERNELS", "").strip().lower()
if _requested not in ("", "c", "python"):
    raise ImportError(f"PAPERTAB_KERNELS must be 'c' or 'python', got {_requested!r}")

if _requested == "python":
    _impl = pyback
else:
    try:
        from . import _ckern as _impl
    except ImportError:
        if _requested == "c":
            raise
        _impl = pyback

BACKEND = _impl.BACKEND

warp_bilinear_u8 = _impl.warp_bilinear_u8
adaptive_threshold_u8 = _impl.adaptive_threshold_u8
erode_bool = _impl.erode_bool
dilate_bool = _impl.dilate_bool
label_components = _impl.label_components
moore_trace = _impl.moore_trace


def available_backends():
    """Names of importable backends ('python' always, 'c' if built)."""
    names = ["python"]
    try:
        from . import _ckern  # noqa: F401
        names.append("c")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return pyback
    if name == "c":
        from . import _ckern
        return _ckern
    raise ValueError(f"unknown kernel backend {name!r}")
