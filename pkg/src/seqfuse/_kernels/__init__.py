"""Kernel backend selection.

The compiled extension is preferred; the NumPy fallback is loaded when the
extension is unavailable or when SEQFUSE_BACKEND=pure is set. Both expose
run_trial(params, gen) with identical (bit-for-bit) behavior; path recording
is served by the fallback module in either case.
"""

from __future__ import annotations

import os

from . import _pure
from ._params import KernelParams

statistic_path = _pure.statistic_path

_forced = os.environ.get("SEQFUSE_BACKEND", "").strip().lower()

if _forced == "pure":
    run_trial = _pure.run_trial
    BACKEND = "pure"
elif _forced in ("", "compiled", "core"):
    try:
        from . import _core

        run_trial = _core.run_trial
        BACKEND = "compiled"
    except ImportError:
        if _forced:
            raise
        run_trial = _pure.run_trial
        BACKEND = "pure"
else:
    raise RuntimeError(
        f"SEQFUSE_BACKEND must be 'pure' or 'compiled', got {_forced!r}"
    )

__all__ = ["run_trial", "statistic_path", "KernelParams", "BACKEND"]
