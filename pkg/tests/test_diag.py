import os
import re
import random

import pytest

from helpers import FakeClock
from shoplist.diag import (
    EnvironmentInfo,
    TickTimer,
    display_measure_result,
    environment_snapshot,
    start_measure,
)
from shoplist.errors import NotStarted

MESSAGE_RE = re.compile(r"^.+ took: [0-9]+ms$")


def test_measured_interval_message():
    clock = FakeClock(1_000)
    timer = start_measure(clock)
    assert timer.start_tick == 1_000
    clock.now = 1_350
    assert display_measure_result(timer, "load") == "load took: 350ms"


def test_zero_interval():
    clock = FakeClock(42)
    timer = start_measure(clock)
    assert display_measure_result(timer, "noop") == "noop took: 0ms"


def test_unstarted_timer_raises():
    timer = TickTimer(FakeClock())
    with pytest.raises(NotStarted):
        timer.time_taken
    with pytest.raises(NotStarted):
        display_measure_result(timer, "x")


def test_restart_resets_origin():
    clock = FakeClock(0)
    timer = start_measure(clock)
    clock.now = 100
    display_measure_result(timer, "first")
    clock.now = 500
    timer.start()
    clock.now = 530
    assert display_measure_result(timer, "second") == "second took: 30ms"


def test_sequential_timers_monotone():
    first = start_measure()
    second = start_measure()
    assert second.start_tick >= first.start_tick


def test_real_clock_measures_something():
    timer = start_measure()
    message = display_measure_result(timer, "sleep")
    assert timer.time_taken >= 0
    assert MESSAGE_RE.match(message)


def test_message_format_randomized():
    rng = random.Random(8)
    for _ in range(100):
        clock = FakeClock(rng.randrange(10**9))
        timer = start_measure(clock)
        clock.now += rng.randrange(0, 100_000)
        message = display_measure_result(timer, f"job{rng.randrange(100)}")
        assert MESSAGE_RE.match(message)
        assert timer.time_taken == timer.end_tick - timer.start_tick


def test_environment_snapshot_fields():
    info = environment_snapshot()
    assert isinstance(info, EnvironmentInfo)
    assert info.current_directory == os.getcwd()
    for field in (info.machine_name, info.user_name, info.os_version):
        assert isinstance(field, str) and field
