"""Worker-thread configuration shared by all batch-parallel entry points.

Must be imported before numba anywhere in this package: numba freezes its
thread-pool size at import time from NUMBA_NUM_THREADS, so we raise the cap
first. Results never depend on the thread count, only wall time does.
"""

import os
import sys
from contextlib import contextmanager

_MIN_CAP = 8

if "numba" not in sys.modules:
    cap = max(_MIN_CAP, os.cpu_count() or 1)
    os.environ.setdefault("NUMBA_NUM_THREADS", str(cap))
    os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numba

# the raised cap is headroom for explicit requests; default to the hardware
numba.set_num_threads(min(int(numba.config.NUMBA_NUM_THREADS),
                          os.cpu_count() or 1))

ENV_THREADS = "SIGCORE_THREADS"


def max_threads() -> int:
    """Hard cap on worker threads for this process."""
    return int(numba.config.NUMBA_NUM_THREADS)


def get_threads() -> int:
    """Number of worker threads batch-parallel calls currently use."""
    return int(numba.get_num_threads())


def set_threads(n: int) -> int:
    """Set the worker count, clamped to [1, max_threads()]; returns the value used."""
    n = max(1, min(int(n), max_threads()))
    numba.set_num_threads(n)
    return n


def resolve_threads(requested: int | None = None) -> int:
    """Apply an explicit request, else the SIGCORE_THREADS default, else keep current."""
    if requested is None:
        env = os.environ.get(ENV_THREADS)
        if env is None:
            return get_threads()
        requested = int(env)
    return set_threads(requested)


@contextmanager
def threads(n: int | None):
    """Temporarily switch the worker count for the duration of one call."""
    if n is None:
        yield get_threads()
        return
    prev = get_threads()
    try:
        yield set_threads(n)
    finally:
        numba.set_num_threads(prev)
