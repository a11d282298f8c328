"""Order-preserving worker pool used by every stage."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    """Return the worker count, defaulting to the available parallelism."""
    if workers is None:
        return os.cpu_count() or 1
    return max(1, int(workers))


def parallel_map(
    func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = 1
) -> List[R]:
    """Map ``func`` over ``items`` and return results in input order.

    Results never depend on the worker count: each item is processed
    independently and the caller reduces them in list order.
    """
    items = list(items)
    count = min(resolve_workers(workers), len(items))
    if count <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, items))
