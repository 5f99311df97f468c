"""Miscellaneous helpers and utilities."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

ROOT_FORMATTER = logging.Formatter("%(levelname)s - %(name)s -   %(message)s")

ROOT_STREAM_HANDLER = logging.StreamHandler()
ROOT_STREAM_HANDLER.setLevel(logging.DEBUG)
ROOT_STREAM_HANDLER.setFormatter(ROOT_FORMATTER)
ROOT_LOGGER = logging.getLogger()
ROOT_LOGGER.setLevel(logging.INFO)
ROOT_LOGGER.addHandler(ROOT_STREAM_HANDLER)

T = TypeVar('T')
R = TypeVar('R')


def get_torusflow_logger(name: Optional[str]):
    """Custom logging wraper, called each time a logger is declared in the package.

    Note:
        Please make sure to call ``get_torusflow_logger`` rather than ``logging.getLogger``, so as to centralize the
        logging configuration and make sure ``ROOT_LOGGER`` is defined. To change the logging level, please change
        ``ROOT_LOGGER`` directly.
    """
    return logging.getLogger(name)


def timer(func):
    """Decorator logging the wall-clock duration of ``func`` at debug level."""

    def inner(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        logging.getLogger(func.__module__).debug(f'{func.__name__} took {time.perf_counter() - start:.3f}s')
        return result

    inner.__name__ = func.__name__
    inner.__doc__ = func.__doc__
    return inner


def split_list(list_: list, n: int) -> List[list]:
    """Divides ``list_`` into consecutive chunks of ``n`` elements; the last chunk may be shorter."""
    return [list_[start:start + n] for start in range(0, len(list_), n)]


def ordered_map(func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> List[R]:
    """Applies ``func`` to every item, in a thread pool if ``threads > 1``.

    Results always come back in the order of ``items``, whatever the number of threads.
    """
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
