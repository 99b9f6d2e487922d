"""Tick-count timing and environment information.

The timer message format is fixed: '<label> took: <ms>ms'.  The tick
source is a monotone millisecond counter, injectable for tests.
"""

from __future__ import annotations

import getpass
import os
import platform
import time
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import NotStarted

TickClock = Callable[[], int]


def _monotonic_ms() -> int:
    return time.monotonic_ns() // 1_000_000


class TickTimer:
    def __init__(self, clock: Optional[TickClock] = None):
        self.clock: TickClock = clock or _monotonic_ms
        self.start_tick: Optional[int] = None
        self.end_tick: Optional[int] = None

    def start(self) -> "TickTimer":
        self.start_tick = self.clock()
        return self

    @property
    def time_taken(self) -> int:
        if self.start_tick is None or self.end_tick is None:
            raise NotStarted("timer has not been started and stopped")
        return self.end_tick - self.start_tick


def start_measure(clock: Optional[TickClock] = None) -> TickTimer:
    return TickTimer(clock).start()


def display_measure_result(timer: TickTimer, label: str) -> str:
    if timer.start_tick is None:
        raise NotStarted("call start_measure first")
    timer.end_tick = timer.clock()
    return f"{label} took: {timer.time_taken}ms"


@dataclass(frozen=True)
class EnvironmentInfo:
    current_directory: str
    machine_name: str
    user_name: str
    os_version: str


def environment_snapshot() -> EnvironmentInfo:
    def grab(fn):
        try:
            value = fn()
        except Exception:
            return "unknown"
        return value or "unknown"

    return EnvironmentInfo(
        current_directory=grab(os.getcwd),
        machine_name=grab(platform.node),
        user_name=grab(getpass.getuser),
        os_version=grab(platform.platform),
    )
