import math
import numpy as np

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

from settings import settings

_scoped_threads: ContextVar[Optional[int]] = ContextVar("scoped_threads", default=None)

def worker_threads(threads: Optional[int] = None) -> int:
    """Explicit count, else the enclosing thread_scope, else settings.threads."""
    return threads or _scoped_threads.get() or settings.threads

@contextmanager
def thread_scope(threads: int) -> Iterator[None]:
    token = _scoped_threads.set(threads)
    try:
        yield
    finally:
        _scoped_threads.reset(token)

def block_sum(values: np.ndarray, threads: Optional[int] = None, block_size: Optional[int] = None) -> float:
    """Deterministic sum: fixed-length blocks summed by numpy, partials combined in order by fsum.

    The block partition depends only on block_size, never on the thread count, so the
    result is bit-identical for any number of workers.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    block_size = block_size or settings.block_size
    threads = worker_threads(threads)
    if values.size == 0:
        return 0.0
    starts = range(0, values.size, block_size)
    partial = lambda start: float(np.sum(values[start:start + block_size]))
    if threads > 1 and values.size > block_size:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            partials = list(executor.map(partial, starts))
    else:
        partials = [partial(start) for start in starts]
    return math.fsum(partials)

def log_product(factors: np.ndarray) -> float:
    """Compensated sum of logs of positive factors."""
    factors = np.asarray(factors, dtype=np.float64)
    return block_sum(np.log(factors))
