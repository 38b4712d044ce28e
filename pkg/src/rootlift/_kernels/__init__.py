"""Fiber root-solving kernels: compiled core with a numpy fallback.

The compiled extension is selected at import time when present; set
``ROOTLIFT_KERNEL=numpy`` to force the fallback (useful for the
benchmark and for backend-agreement tests).
"""

import os

from . import _pyroots

solve_fibers_numpy = _pyroots.solve_fibers
residuals = _pyroots.residuals
horner = _pyroots.horner
polish = _pyroots.polish

if os.environ.get("ROOTLIFT_KERNEL", "").lower() == "numpy":
    BACKEND = "numpy"
    solve_fibers = _pyroots.solve_fibers
    solve_fibers_compiled = None
else:
    try:
        from . import _fastroots

        BACKEND = "compiled"
        solve_fibers = _fastroots.solve_fibers
        solve_fibers_compiled = _fastroots.solve_fibers
    except ImportError:
        BACKEND = "numpy"
        solve_fibers = _pyroots.solve_fibers
        solve_fibers_compiled = None

__all__ = [
    "BACKEND",
    "solve_fibers",
    "solve_fibers_numpy",
    "solve_fibers_compiled",
    "residuals",
    "horner",
    "polish",
]
