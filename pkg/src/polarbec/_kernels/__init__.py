"""Kernel selection: compiled extension when available, pure Python otherwise.

Set POLARBEC_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the twin-equivalence tests).
"""

import os

from . import peel_py

triangulate_python = peel_py.triangulate
triangulate_native = None

if not os.environ.get("POLARBEC_PURE_PYTHON"):
    try:
        from . import _peel

        triangulate_native = _peel.triangulate
    except ImportError:
        triangulate_native = None

triangulate = triangulate_native or triangulate_python
KERNEL_KIND = "cython" if triangulate_native is not None else "python"
