import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "CASIMIR_SPECTRA_THREADS"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(ENV_THREADS, "1")))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """``list(map(fn, items))``, optionally threaded; output order always follows ``items``."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
