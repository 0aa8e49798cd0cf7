"""Order-preserving parallel map used by the scans."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
U = TypeVar("U")


def parallel_map(fn: Callable[[T], U], items: Iterable[T], threads: int = 1) -> list[U]:
    """``list(map(fn, items))``, optionally spread over a thread pool.

    Results always come back in input order, so output does not depend on
    the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
