"""Pick the kernel implementation at import time.

The compiled extension is preferred; ``SIS_SOURCE_PURE_PYTHON=1`` forces the
numpy fallback (the test suite uses this to exercise both).
"""

import os

if os.environ.get("SIS_SOURCE_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _pykernels as kernels

BACKEND = kernels.NAME
