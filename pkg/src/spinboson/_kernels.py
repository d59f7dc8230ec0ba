"""Selection of the RK4 propagation kernel at import time.

The compiled Cython kernel is preferred; if the extension is missing (source
tree without a build, unsupported platform) the pure-Python/SciPy twin is
used instead. Set the environment variable ``SPINBOSON_PURE_PYTHON=1`` to
force the fallback.
"""

import os

if os.environ.get("SPINBOSON_PURE_PYTHON"):
    from ._rk4_py import BACKEND_NAME, rk4_propagate
else:
    try:
        from ._rk4 import BACKEND_NAME, rk4_propagate
    except ImportError:
        from ._rk4_py import BACKEND_NAME, rk4_propagate

__all__ = ["rk4_propagate", "BACKEND_NAME"]
