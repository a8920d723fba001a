"""Bounded worker pool over replicate indices with results in replicate order."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "LEVY_BESOV_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(ENV_THREADS, "1") or 1)
    return max(1, int(threads))


def map_replicates(fn, n: int, threads: int | None = None) -> list:
    """[fn(0), ..., fn(n-1)], computed on up to ``threads`` workers."""
    threads = resolve_threads(threads)
    if threads == 1 or n <= 1:
        return [fn(r) for r in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))
