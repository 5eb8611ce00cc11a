"""Ordered fan-out of independent chunks over a thread pool."""

import logging
import os

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from salemgen._constants import THREADS_ENV

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Thread cap: explicit value, else ``SALEMGEN_THREADS``, else 1."""
    if threads is None:
        env_value = os.environ.get(THREADS_ENV)
        if env_value:
            try:
                threads = int(env_value)
            except ValueError:
                logger.warning(f"Ignoring non-integer {THREADS_ENV}={env_value!r}")
                threads = 1
        else:
            threads = 1
    return max(1, threads)


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """Apply ``func`` to each item; results keep the input order."""
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
