"""Backend switch for the hot numeric kernels.

Set ``BETA_TURAN_JIT=0`` to force the pure-numpy path.  When numba cannot be
imported the numpy path is used regardless of the flag.
"""
import os

_FLAG = os.environ.get("BETA_TURAN_JIT", "1").strip().lower()
JIT_REQUESTED = _FLAG not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_JIT = JIT_REQUESTED and HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` with cache/nogil defaults, or a no-op without numba."""
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda func: func
