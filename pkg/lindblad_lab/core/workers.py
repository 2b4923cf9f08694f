"""Local worker pool for independent scenario cells.

numpy and scipy release the GIL inside their dense kernels, so a thread pool
is enough to overlap cells. Results are always returned in input order.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from typing import TypeVar

from lindblad_lab.core.config import settings

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def run_ordered(
    fn: Callable[[T], R],
    items: Sequence[T],
    max_workers: int | None = None,
) -> list[R]:
    """Apply ``fn`` to every item, possibly concurrently, preserving order.

    Args:
        fn: Pure function of one cell.
        items: Cells, indexed by position.
        max_workers: Pool size; defaults to ``settings.MAX_WORKERS``.
            A value of 1 (or a single item) runs inline.

    Returns:
        ``[fn(item) for item in items]``.
    """
    workers = max_workers if max_workers is not None else settings.MAX_WORKERS
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug("Dispatching cells to pool", extra={"cells": len(items), "workers": workers})
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # each task runs in a copy of the caller's context so run_id reaches the logs
        futures = [pool.submit(copy_context().run, fn, item) for item in items]
        return [future.result() for future in futures]
