"""Backend selection for the Monte Carlo kernels.

numba is used when importable unless ``PRECOLLAPSE_DISABLE_NUMBA`` is set to a
truthy value, in which case the vectorized numpy path runs instead. Both paths
produce bit-identical outcomes. ``PRECOLLAPSE_SIM_THREADS`` caps parallelism.
"""
from __future__ import annotations

import os

DISABLE_ENV = "PRECOLLAPSE_DISABLE_NUMBA"
THREADS_ENV = "PRECOLLAPSE_SIM_THREADS"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _truthy(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def use_numba() -> bool:
    return HAVE_NUMBA and not _truthy(os.environ.get(DISABLE_ENV, ""))


def backend_name() -> str:
    return "numba" if use_numba() else "numpy"


def max_threads() -> int:
    if HAVE_NUMBA:
        import numba

        return numba.config.NUMBA_NUM_THREADS
    return os.cpu_count() or 1


def thread_count() -> int:
    """Worker count: the env cap if set, else every available core."""
    limit = max_threads()
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return limit
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return min(n, limit)
