"""Kernel selection: compiled closure if available, pure Python otherwise.

Set CICSIM_PURE_KERNEL=1 to force the fallback (used by the benchmark and
the kernel-equivalence tests).
"""

from __future__ import annotations

import os

from . import _reach_py

if os.environ.get("CICSIM_PURE_KERNEL"):
    closure_masks = _reach_py.closure_masks
    KERNEL = "python"
else:
    try:
        from . import _reach_c  # type: ignore[attr-defined]

        closure_masks = _reach_c.closure_masks
        KERNEL = "cython"
    except ImportError:  # extension not built
        closure_masks = _reach_py.closure_masks
        KERNEL = "python"
