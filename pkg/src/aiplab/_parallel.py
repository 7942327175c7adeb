"""Order-preserving thread fan-out capped by ``AIP_LAB_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "AIP_LAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, cap)


def ordered_map(fn, items):
    """``[fn(x) for x in items]``, run on up to ``worker_count()`` threads."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
