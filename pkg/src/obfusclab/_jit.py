"""Optional numba acceleration.

Kernels are written once as plain Python over numpy arrays and wrapped with
:func:`njit`.  Setting ``OBFUSCLAB_DISABLE_JIT=1`` (or running without numba
installed) selects the numpy fallback path instead; callers check
:data:`JIT_ENABLED` to pick between the two.
"""

import os

_disabled = os.environ.get("OBFUSCLAB_DISABLE_JIT", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError
    import numba
except ImportError:  # pragma: no cover - depends on environment
    numba = None

JIT_ENABLED = numba is not None


def njit(func):
    """Compile ``func`` in nopython mode when numba is active, else return it."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)
