"""
Worker pool for fanning out independent slices of work
"""
import logging
import multiprocessing as mp
from typing import Callable, Iterable, List, Optional, TypeVar

from app import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """
    Process pool with ordered results.

    With jobs == 1 everything runs in the calling process, so the pool can be
    passed around unconditionally.
    """

    def __init__(self, jobs: Optional[int] = None):
        self.jobs = max(1, config.JOBS if jobs is None else jobs)
        self._pool = None

    def start(self):
        if self.jobs > 1 and self._pool is None:
            logger.info(f"🚀 Starting {self.jobs} workers")
            self._pool = mp.get_context("spawn").Pool(processes=self.jobs)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.jobs == 1 or len(items) < 2:
            return [fn(item) for item in items]
        self.start()
        logger.debug(f"🔄 Fanning out {len(items)} tasks over {self.jobs} workers")
        return self._pool.map(fn, items)

    def stop(self):
        if self._pool is not None:
            logger.info("🛑 Stopping workers...")
            self._pool.close()
            self._pool.join()
            self._pool = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc):
        self.stop()
        return False
