"""
Thread-pool fan-out for per-modulus work.

The numerical kernels are synchronous numpy/scipy code; map_moduli runs them
in worker threads from an anyio task group, at most WORKER_THREADS at a time,
and returns the results in input order.
"""

from typing import Callable, List, Optional, Sequence, TypeVar

import anyio

from legendrian.config import WORKER_THREADS
from legendrian.logging_utils import get_logger

logger = get_logger("PARALLEL")

T = TypeVar("T")
R = TypeVar("R")


async def map_moduli(fn: Callable[[T], R], items: Sequence[T],
                     workers: Optional[int] = None) -> List[R]:
    """
    Apply fn to every item in worker threads.

    Args:
        fn: synchronous function of one item
        items: inputs, e.g. the points of a traced modular curve
        workers: thread cap; defaults to LEGENDRIAN_WORKERS

    Returns:
        list: fn(item) for every item, in the order of `items`.
        The first exception raised by fn cancels the rest and propagates.
    """
    limiter = anyio.CapacityLimiter(max(1, workers or WORKER_THREADS))
    results: List[Optional[R]] = [None] * len(items)

    async def run_one(index: int, item: T) -> None:
        results[index] = await anyio.to_thread.run_sync(fn, item, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(run_one, index, item)
    logger.debug("mapped %d items over %d threads", len(items), limiter.total_tokens)
    return results
