"""Optional numba acceleration.

Set ``BISIMLOGIC_DISABLE_NUMBA=1`` to force the pure-numpy kernels, e.g. for
debugging or when comparing both paths in ``benchmarks/``.
"""
import os

_DISABLED = os.environ.get("BISIMLOGIC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba
except ImportError:
    numba = None

NUMBA_ENABLED = numba is not None


def njit(func):
    """Compile ``func`` in nopython mode when numba is enabled, else return it unchanged."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)
