"""Select the compiled kernels when available, else the NumPy fallback.

Set ``UDNCOV_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
loggamma = _kernels_py.loggamma
trial_reduce = _kernels_py.trial_reduce

if os.environ.get("UDNCOV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _ext
    except ImportError:  # extension not built
        pass
    else:
        loggamma = _ext.loggamma
        trial_reduce = _ext.trial_reduce
        BACKEND = "cython"
