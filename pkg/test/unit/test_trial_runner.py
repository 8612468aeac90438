"""Unit tests for trial runners."""

import threading
import time

import pytest

from wiener_recovery.infrastructure.trial_runner import (
    SerialTrialRunner,
    ThreadedTrialRunner,
)


class TestSerialTrialRunner:
    """Test the in-thread runner."""

    def test_preserves_order(self):
        """Test that results follow the input order."""
        assert SerialTrialRunner().run(lambda x: x * x, [3, 1, 2]) == [9, 1, 4]


class TestThreadedTrialRunner:
    """Test the thread-pool runner."""

    def test_order_independent_of_completion(self):
        """Test that late finishers keep their place."""

        def trial(x):
            time.sleep(0.01 * (5 - x))
            return x

        assert ThreadedTrialRunner(4).run(trial, [0, 1, 2, 3, 4]) == [0, 1, 2, 3, 4]

    def test_uses_several_threads(self):
        """Test that work is spread over worker threads."""
        names = set()
        barrier = threading.Barrier(2, timeout=5)

        def trial(x):
            names.add(threading.current_thread().name)
            barrier.wait()
            return x

        ThreadedTrialRunner(2).run(trial, [0, 1])

        assert len(names) == 2

    def test_matches_serial(self):
        """Test that threaded and serial runs agree."""
        items = list(range(20))

        threaded = ThreadedTrialRunner(3).run(str, items)

        assert threaded == SerialTrialRunner().run(str, items)

    def test_rejects_zero_threads(self):
        """Test that at least one thread is required."""
        with pytest.raises(ValueError):
            ThreadedTrialRunner(0)

    def test_propagates_exceptions(self):
        """Test that a failing trial raises in the caller."""

        def trial(x):
            raise RuntimeError(f"trial {x} failed")

        with pytest.raises(RuntimeError):
            ThreadedTrialRunner(2).run(trial, [1, 2])
