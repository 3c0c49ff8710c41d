import os
from concurrent.futures import ProcessPoolExecutor


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def pmap(fn, items, jobs: int | None = None, chunksize: int = 16) -> list:
    """Order-preserving map; runs in-process when ``jobs`` is 1."""
    items = list(items)
    jobs = default_jobs() if jobs is None else int(jobs)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, chunksize)))
