"""Raster kernels: exact distance transform, thinning, component labels.

Two interchangeable backends live here. The compiled extension is used
when it imports cleanly; the pure-numpy module is the fallback. Set
VESSELKIT_KERNELS=pure or =compiled to force one (forcing the compiled
backend raises if the extension is missing).
"""

import os

from . import pure as _pure

_requested = os.environ.get("VESSELKIT_KERNELS", "auto").strip().lower()
if _requested not in ("auto", "compiled", "pure"):
    raise ValueError(
        f"VESSELKIT_KERNELS must be auto, compiled or pure, got {_requested!r}"
    )

if _requested == "pure":
    _impl = _pure
    KERNEL_BACKEND = "pure"
else:
    try:
        from . import _cykernels as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _pure
        KERNEL_BACKEND = "pure"

edt = _impl.edt
thin = _impl.thin
label = _impl.label

__all__ = ["edt", "thin", "label", "KERNEL_BACKEND"]
