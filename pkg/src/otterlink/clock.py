"""Clock injection: all time flows through a Clock so the simulator can run
the whole system on virtual time.
"""

from __future__ import annotations

import time
from typing import Protocol


class Clock(Protocol):
    def now(self) -> float:
        """Current UTC time as unix seconds."""
        ...


class SystemClock:
    def now(self) -> float:
        return time.time()


class VirtualClock:
    """Settable clock for deterministic simulation; never goes backwards."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance_to(self, t: float) -> None:
        if t < self._now:
            raise ValueError(f"clock cannot go backwards: {t} < {self._now}")
        self._now = float(t)


def local_minutes_of_day(t: float, tz_offset_mins: int) -> int:
    """Minute-of-day [0, 1440) in the user's local time."""
    return int((t + tz_offset_mins * 60) // 60) % 1440


def local_day_start(t: float, tz_offset_mins: int) -> float:
    """UTC instant of local midnight for the local day containing ``t``."""
    shift = tz_offset_mins * 60
    return ((t + shift) // 86400) * 86400 - shift
