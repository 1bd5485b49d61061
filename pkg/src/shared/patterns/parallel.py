"""
Order-preserving fan-out for independent pipeline evaluations.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = 1) -> List[R]:
    """
    Apply func to every item and return results in input order.

    Each call must be independent of the others; the result list is the same
    for any worker count.
    """
    materialized = list(items)
    if not workers or workers <= 1 or len(materialized) <= 1:
        return [func(item) for item in materialized]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, materialized))
