"""Select the kernel backend at import time.

The compiled extension is used when it is importable; set
``TOPROT_PURE_PYTHON=1`` to force the pure-Python kernels.
"""

import os

from toprot import _pykernels

if os.environ.get("TOPROT_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from toprot import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = "cython" if kernels is not _pykernels else "python"
