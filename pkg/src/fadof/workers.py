"""Deterministic fan-out helpers.

Work is always split along fixed boundaries chosen independently of the
worker count, and results are gathered in submission order, so the assembled
output is bitwise identical whether it was computed serially or on a pool.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_workers(workers=None) -> int:
    """Worker count from argument, FADOF_WORKERS, or available parallelism."""
    if workers is None:
        env = os.environ.get("FADOF_WORKERS")
        if env is not None and env.strip():
            workers = int(env)
    if workers is None:
        workers = os.cpu_count() or 1
    return max(1, int(workers))


def deterministic_map(fn, items, workers):
    """Apply fn over items, preserving order; threads only when they can help."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
