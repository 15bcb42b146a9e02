"""Deterministic parallel mapping over independent tasks.

Results come back in task order no matter how workers are scheduled; each
task must derive its own RNG stream from its index, so the output of a run
depends only on the task list, never on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

__all__ = ["parallel_map"]


def parallel_map(fn: Callable, tasks: Sequence, cores: int) -> list:
    if cores <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    workers = min(cores, len(tasks))
    chunk = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=chunk))
