"""Lightweight work counters and phase timers.

Counting is off unless a ``recording()`` block is active, so library calls
made outside the CLI pay only a context-variable lookup.
"""
import time
from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar

_current: ContextVar = ContextVar("kmismatch2d_counters", default=None)


class Recorder:
    def __init__(self):
        self.counters = Counter()
        self.timings = Counter()

    def as_lines(self):
        lines = [f"{key}={self.counters[key]}" for key in sorted(self.counters)]
        lines += [f"time_{key}_ms={self.timings[key] * 1000:.3f}" for key in sorted(self.timings)]
        return lines


@contextmanager
def recording(rec=None):
    rec = rec if rec is not None else Recorder()
    token = _current.set(rec)
    try:
        yield rec
    finally:
        _current.reset(token)


def bump(name, amount=1):
    rec = _current.get()
    if rec is not None:
        rec.counters[name] += int(amount)


def note(name, value):
    """Record a value (last write wins) rather than accumulating it."""
    rec = _current.get()
    if rec is not None:
        rec.counters[name] = value


@contextmanager
def phase(name):
    rec = _current.get()
    if rec is None:
        yield
        return
    start = time.perf_counter()
    try:
        yield
    finally:
        rec.timings[name] += time.perf_counter() - start
