"""Command-line front end (``spectra``)."""
import os

# BLAS pools are sized when numpy loads, so this must run before any numpy import.
_threads = os.environ.get("SPECTRA_THREADS", "1")
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
    os.environ.setdefault(_var, _threads)
