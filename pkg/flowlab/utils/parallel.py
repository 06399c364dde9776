import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Iterable, List, TypeVar, Optional

from ditk import logging

T = TypeVar('T')
R = TypeVar('R')

#: Environment variable capping the number of worker threads.
THREADS_ENV = 'FLOWLAB_THREADS'


@lru_cache()
def _cpu_count() -> int:
    return os.cpu_count() or 1


def get_thread_count(default: Optional[int] = None) -> int:
    """
    Number of worker threads flowlab is allowed to use.

    The value of ``FLOWLAB_THREADS`` wins when it is a positive integer, otherwise (unset or ``0``)
    ``default`` or the number of CPUs is used.
    """
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            count = int(value)
        except ValueError:
            logging.warning(f'Invalid {THREADS_ENV} value {value!r}, ignored.')
        else:
            if count > 0:
                return count
            elif count < 0:
                logging.warning(f'Negative {THREADS_ENV} value {value!r}, ignored.')

    return default or _cpu_count()


def parallel_map(fn: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None) -> List[R]:
    """
    Ordered map over ``items`` on a thread pool. Results keep the order of ``items``.
    """
    items = list(items)
    max_workers = max_workers or get_thread_count()
    if max_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=min(max_workers, len(items))) as pool:
        return list(pool.map(fn, items))
