"""Backend selection for the compiled kernels.

Set ``PRECIPMIX_DISABLE_NUMBA=1`` before import to run every kernel through
its pure-numpy twin. The flag is read once at import time.
"""
import os

_FLAG = os.environ.get("PRECIPMIX_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    Unlike the backend switch this does not consult the env flag: scalar
    helpers are always compiled when numba exists, because the compiled array
    kernels call them.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
