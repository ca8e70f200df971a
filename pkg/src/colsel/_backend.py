"""Kernel backend selection, resolved once at import time."""
import os

from colsel import _pykernels

if os.environ.get("COLSEL_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from colsel import _kernels as kernels
        BACKEND = "cython"
    except ImportError:  # extension not built
        kernels = _pykernels
        BACKEND = "python"

jacobi_eigh = kernels.jacobi_eigh
secular_terms = kernels.secular_terms
