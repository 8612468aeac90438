"""Worker pools that evaluate independent trials and keep config order."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class SerialTrialRunner:
    """Run trials one after another in the calling thread."""

    def run(self, trial: Callable[[T], R], items: Sequence[T]) -> list[R]:
        return [trial(item) for item in items]


class ThreadedTrialRunner:
    """
    Run trials on a thread pool.

    ``Executor.map`` yields results in submission order, so the output
    order never depends on completion order. NumPy and LAPACK release the
    GIL inside the heavy kernels.
    """

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ValueError(f"thread count must be >= 1, got {threads}")
        self.threads = threads

    def run(self, trial: Callable[[T], R], items: Sequence[T]) -> list[R]:
        if self.threads == 1 or len(items) <= 1:
            return SerialTrialRunner().run(trial, items)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(trial, items))
