"""Kernel backend selector: native Cython extension with pure-Python fallback.

The native module is an optional build artifact; when missing (no compiler,
TILECAST_NO_NATIVE=1 at install time) the pure-Python implementation takes
over transparently. Set TILECAST_KERNELS=python to force the fallback at
runtime, e.g. for benchmarking the two against each other.
"""

from __future__ import annotations

import os

if os.environ.get("TILECAST_KERNELS") == "python":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND

md5_hex = _impl.md5_hex
grid_signatures = _impl.grid_signatures
crop_rgba = _impl.crop_rgba
paste_rgba = _impl.paste_rgba
