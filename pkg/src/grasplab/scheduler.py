"""Deterministic fixed-step scheduler.  One tick is 1 ms of simulated time.

Tasks are polled round-robin in registration order, so two runs with the
same inputs produce identical event interleavings.
"""
from __future__ import annotations

from typing import Callable

TICK_MS = 1


class TickScheduler:
    def __init__(self, bus=None):
        self.tick = 0
        self._tasks: list[tuple[int, int, Callable[[int], None]]] = []
        if bus is not None:
            bus.set_clock(lambda: self.tick)

    def every(self, period_ticks: int, fn: Callable[[int], None], phase: int = 0) -> None:
        """Run fn(tick) whenever (tick - phase) is a non-negative multiple of period."""
        if period_ticks < 1:
            raise ValueError("period must be >= 1 tick")
        self._tasks.append((period_ticks, phase, fn))

    def run(self, ticks: int) -> None:
        for _ in range(ticks):
            for period, phase, fn in self._tasks:
                if self.tick >= phase and (self.tick - phase) % period == 0:
                    fn(self.tick)
            self.tick += 1

    def run_until(self, predicate: Callable[[], bool], max_ticks: int) -> bool:
        """Step until predicate() holds; True if it did within max_ticks."""
        deadline = self.tick + max_ticks
        while self.tick < deadline:
            if predicate():
                return True
            self.run(1)
        return predicate()
