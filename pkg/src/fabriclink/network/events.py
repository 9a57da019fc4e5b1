#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Deterministic event core.

Events fire in ``(fire_time, sequence)`` order. ``sequence`` is assigned at
registration, so events registered for the same nanosecond fire in the order
they were registered. Time is an integer nanosecond count.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, List, Optional


@dataclass(order=True, frozen=True)
class Event:
    fire_time: int
    sequence: int
    action: Callable[[], None] = field(compare=False)


class EventCore:
    """
    Priority queue of pending events plus the simulation clock.

    Single-threaded. Independent simulations each own their core.
    """

    def __init__(self):
        self.now: int = 0
        self.processed: int = 0
        self._queue: List[Event] = []
        self._seq: int = 0

    def __len__(self) -> int:
        return len(self._queue)

    def is_empty(self) -> bool:
        return not self._queue

    def schedule(self, delta: int, action: Callable[[], None]) -> Event:
        """Fire ``action`` once at ``now + delta``."""
        if isinstance(delta, bool) or not isinstance(delta, int):
            raise TypeError(f"delta must be an integer ns count, got {delta!r}")
        if delta < 0:
            raise ValueError(f"delta must be non-negative, got {delta}")
        return self.schedule_at(self.now + delta, action)

    def schedule_at(self, fire_time: int, action: Callable[[], None]) -> Event:
        if fire_time < self.now:
            raise ValueError(
                f"cannot schedule at {fire_time} ns, clock is already at {self.now} ns"
            )
        ev = Event(int(fire_time), self._seq, action)
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    def peek(self) -> Optional[Event]:
        return self._queue[0] if self._queue else None

    def step(self) -> bool:
        """Process the earliest event. Returns ``False`` when the queue is empty."""
        if not self._queue:
            return False
        ev = heapq.heappop(self._queue)
        self.now = ev.fire_time
        self.processed += 1
        ev.action()
        return True

    def run(self) -> int:
        while self.step():
            pass
        return self.now
