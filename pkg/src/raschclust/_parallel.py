"""Optional process parallelism for independent replications.

Worker count comes from the RASCHCLUST_WORKERS environment variable and
defaults to the number of available cores. Results are identical for any
worker count because every unit of work derives its RNG stream from
(seed, replication ids) alone.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigError


def worker_count() -> int:
    raw = os.environ.get("RASCHCLUST_WORKERS", "")
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RASCHCLUST_WORKERS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"RASCHCLUST_WORKERS must be >= 1, got {n}")
    return n


def parallel_map(fn, items) -> list:
    """Order-preserving map, forked across workers when more than one."""
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
