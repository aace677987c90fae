"""Select the compiled kernels when available, else the numpy fallback.

Set ``DUALWAVE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py as python_kernels

compiled_kernels = None
if os.environ.get("DUALWAVE_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as compiled_kernels
    except ImportError:
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = "cython" if compiled_kernels is not None else "python"

regulated_dft = kernels.regulated_dft
phase_increments = kernels.phase_increments
accumulate_abs2 = kernels.accumulate_abs2
