"""Kernel backend selection.

The compiled extension is used when importable; set ``LATGAS_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from latgas import _pykernels

kernels = _pykernels
BACKEND = "python"

if os.environ.get("LATGAS_PURE_PYTHON", "") != "1":
    try:
        from latgas import _ckernels
    except ImportError:
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"
