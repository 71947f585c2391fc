"""Hot-kernel backend selection.

The EFIE interaction moments dominate runtime.  Two interchangeable backends
exist: a numba-compiled kernel (default when numba imports cleanly) and a
vectorized pure-numpy fallback.  Set ``CMMOM_BACKEND=numpy`` or
``CMMOM_BACKEND=numba`` to force one; ``CMMOM_THREADS`` caps numba workers.
"""

import os

from . import efie_numpy

_requested = os.environ.get("CMMOM_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(f"CMMOM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    BACKEND = "numpy"
else:
    try:
        import numba  # noqa: F401

        threads = os.environ.get("CMMOM_THREADS")
        if threads:
            numba.set_num_threads(max(1, int(threads)))
        from . import efie_numba

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        BACKEND = "numpy"

if BACKEND == "numba":
    compute_moments = efie_numba.compute_moments
else:
    compute_moments = efie_numpy.compute_moments
