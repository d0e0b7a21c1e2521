"""Fixed work plans for row sweeps.

The plan (chunk boundaries) depends only on the problem size, never on the
number of workers, and partial results are reduced in plan order. Integer
reductions are therefore exact and floating reductions are bit-identical
for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")

# Target number of matrix cells handled per chunk.
CHUNK_CELLS = 1 << 17


def default_workers() -> int:
    env = os.environ.get("FQ_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("FQ_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def row_plan(lo: int, hi: int, width: int) -> list[tuple[int, int]]:
    """Split the inclusive row range [lo, hi] into half-open chunks."""
    if hi < lo:
        return []
    step = max(1, CHUNK_CELLS // max(width, 1))
    return [(r, min(r + step, hi + 1)) for r in range(lo, hi + 1, step)]


def run_plan(fn: Callable[[int, int], T], plan: Iterable[tuple[int, int]], workers: int | None = None) -> list[T]:
    plan = list(plan)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(plan) <= 1:
        return [fn(lo, hi) for lo, hi in plan]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), plan))
