"""Optional process-level fan-out for per-tuple checks.

``CONFALG_THREADS`` caps the worker count; unset or ``1`` runs serially.
Results always come back in input order.
"""

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("CONFALG_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items, chunk: int = 8):
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) < 2 * chunk:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
