"""Numba switch.

Hot kernels are written once as plain loops and compiled with ``numba.njit``
when numba is importable and ``SPECTRA_NUMBA`` is not set to ``0``.  Every
compiled kernel has a vectorised numpy twin used on the fallback path; the two
paths share the same pair schedule so they agree to rounding.

``SPECTRA_THREADS`` caps numba's thread pool (default 1).
"""
import os

_FALSY = {"0", "false", "no", "off"}

# The bundled TBB is too old for numba and only produces a warning; OpenMP is thread-safe.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

USE_NUMBA = numba is not None and os.environ.get("SPECTRA_NUMBA", "1").strip().lower() not in _FALSY


def thread_count():
    raw = os.environ.get("SPECTRA_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    kwargs.setdefault("cache", True)

    def wrap(fn):
        if not USE_NUMBA:
            return fn
        return numba.njit(**kwargs)(fn)

    if args and callable(args[0]):
        return wrap(args[0])
    return wrap


def configure_threads():
    if USE_NUMBA:
        n = min(thread_count(), numba.config.NUMBA_NUM_THREADS)
        numba.set_num_threads(n)


configure_threads()
