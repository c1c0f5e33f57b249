"""Small shared helpers: environment overrides and optional thread pools."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

OUTPUT_DIR_ENV = "USCATTER_OUTPUT_DIR"
THREADS_ENV = "USCATTER_THREADS"


def output_dir_override() -> str | None:
    """Value of the output-directory override variable, if set and nonempty."""
    value = os.environ.get(OUTPUT_DIR_ENV, "").strip()
    return value or None


def thread_count() -> int:
    """Worker thread count, from the environment override (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def parallel_map(fn, items):
    """Map fn over items, threaded when the env override asks for it.

    Results keep the input order, so threaded and serial runs assemble
    identical outputs.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
