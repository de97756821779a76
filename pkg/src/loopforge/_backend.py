"""Kernel backend selection.

The hot loops (group closure, bulk permutation parity) have two
implementations: numba @njit kernels and a pure-numpy fallback.  The
environment variable LOOPFORGE_BACKEND picks one explicitly:

    LOOPFORGE_BACKEND=numba   require numba, fail if missing
    LOOPFORGE_BACKEND=numpy   force the numpy fallback
    (unset)                   numba when importable, numpy otherwise

LOOPFORGE_THREADS, when set, caps numba's thread pool.  The shipped kernels
are single threaded, so this only matters if numba decides to parallelize
something internally.
"""

import os


def _detect() -> str:
    choice = os.environ.get("LOOPFORGE_BACKEND", "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        import numba  # noqa: F401  -- explicit request, let ImportError surface

        return "numba"
    if choice:
        raise ValueError(f"LOOPFORGE_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


BACKEND = _detect()
USING_NUMBA = BACKEND == "numba"

if USING_NUMBA:
    threads = os.environ.get("LOOPFORGE_THREADS", "").strip()
    if threads:
        import numba

        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
