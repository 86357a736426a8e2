"""Bounded worker pool shared by area tasks and the level-parallel kernels."""

import threading
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from types import TracebackType
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def chunked(items: Sequence[T], size: int) -> list[Sequence[T]]:
    """Split items into consecutive chunks of at most size elements."""
    return [items[start : start + size] for start in range(0, len(items), max(size, 1))]


class WorkerPool:
    """Thread pool with an ordered `map`.

    A `map` issued from inside one of this pool's workers runs inline on that
    worker (caller-runs), so nested use never waits on a saturated pool. With one
    thread everything runs on the caller.
    """

    def __init__(self, threads: int = 1) -> None:
        """Initialize the pool.

        Args:
            threads: Maximum concurrent workers (>= 1).
        """
        self.threads = max(int(threads), 1)
        self._executor: ThreadPoolExecutor | None = None
        if self.threads > 1:
            self._executor = ThreadPoolExecutor(
                max_workers=self.threads, thread_name_prefix="gridflow"
            )
        self._local = threading.local()

    @property
    def in_worker(self) -> bool:
        return bool(getattr(self._local, "active", False))

    def _run(self, fn: Callable[[T], R], item: T) -> R:
        self._local.active = True
        try:
            return fn(item)
        finally:
            self._local.active = False

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply fn to every item; results are returned in input order.

        The exception of the first failing item, in input order, propagates.
        """
        work = list(items)
        if self._executor is None or len(work) <= 1 or self.in_worker:
            return [fn(item) for item in work]
        futures = [self._executor.submit(self._run, fn, item) for item in work]
        return [future.result() for future in futures]

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()


SERIAL = WorkerPool(1)
