"""Deterministic, input-ordered parallel map used by the sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: ``HERDLAB_THREADS`` wins, then ``threads``, then the CPU count."""
    env = os.environ.get("HERDLAB_THREADS")
    if env:
        try:
            threads = int(env)
        except ValueError:
            raise ValidationError("HERDLAB_THREADS", f"not an integer: {env!r}") from None
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ValidationError("threads", "must be >= 1")
    return int(threads)


def pmap(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, spread over a thread pool.

    The compiled kernel releases the GIL, so threads scale for integration
    sweeps.  Results keep input order regardless of completion order.
    """
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
