"""Optional numba acceleration.

Set ``HERDISC_DISABLE_NUMBA=1`` to force the pure-numpy code paths (useful
for debugging and for the benchmark comparing the two).
"""

import os

_FLAG = os.environ.get("HERDISC_DISABLE_NUMBA", "").strip().lower()

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit(cache=True)`` when numba is installed, else identity.

    The numba variants are always importable so the benchmark can time them
    even when the env flag routes the public API to numpy.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
