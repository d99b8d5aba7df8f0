"""Kernel backend selection.

The compiled extension is preferred when present; ``TSCR_PURE_PYTHON=1``
forces the NumPy implementation (useful for benchmarking and debugging).
Both backends implement the same two functions with identical results up
to floating-point rounding.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("TSCR_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

tscr_plane = _impl.tscr_plane
tscr_point = _impl.tscr_point
BACKEND = _impl.BACKEND
HAVE_COMPILED = BACKEND == "cython"
