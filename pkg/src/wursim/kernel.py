"""Discrete-event engine with integer-nanosecond time and seeded random streams."""

from __future__ import annotations

import heapq
from typing import Any, Callable

import numpy as np

NS_PER_US = 1_000
NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000


class ConfigurationError(ValueError):
    """Raised for invalid simulation inputs (bad schedule time, negative sigma, ...)."""


def us(x: float) -> int:
    """Microseconds to integer nanoseconds."""
    return int(round(x * NS_PER_US))


def seconds(x: float) -> int:
    """Seconds to integer nanoseconds."""
    return int(round(x * NS_PER_S))


def to_seconds(t_ns: int) -> float:
    return t_ns / NS_PER_S


class Event:
    __slots__ = ("time", "seq", "fn", "args", "cancelled")

    def __init__(self, time: int, seq: int, fn: Callable, args: tuple):
        self.time = time
        self.seq = seq
        self.fn = fn
        self.args = args
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True

    def __repr__(self) -> str:
        name = getattr(self.fn, "__qualname__", repr(self.fn))
        return f"Event(t={self.time}, seq={self.seq}, {name})"


class Simulator:
    """Event queue ordered by (fire_time, sequence).

    Time is an integer count of nanoseconds.  Events scheduled for the same
    instant fire in scheduling order.
    """

    def __init__(self) -> None:
        self.now = 0
        self._queue: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._stopped = False
        self.processed = 0

    def schedule(self, t: int, fn: Callable, *args: Any) -> Event:
        if t < self.now:
            raise ConfigurationError(f"cannot schedule at {t} ns, now is {self.now} ns")
        ev = Event(t, self._seq, fn, args)
        self._seq += 1
        heapq.heappush(self._queue, (t, ev.seq, ev))
        return ev

    def schedule_in(self, delay: int, fn: Callable, *args: Any) -> Event:
        return self.schedule(self.now + delay, fn, *args)

    def stop(self) -> None:
        self._stopped = True

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._queue if not ev.cancelled)

    def peek_time(self) -> int | None:
        q = self._queue
        while q and q[0][2].cancelled:
            heapq.heappop(q)
        return q[0][0] if q else None

    def run_until(self, t_end: int) -> int:
        """Process every event with fire_time <= t_end; return how many fired."""
        if t_end < self.now:
            raise ConfigurationError(f"t_end {t_end} precedes now {self.now}")
        q = self._queue
        pop = heapq.heappop
        count = 0
        self._stopped = False
        while q and not self._stopped:
            t, _, ev = q[0]
            if t > t_end:
                break
            pop(q)
            if ev.cancelled:
                continue
            self.now = t
            ev.fn(*ev.args)
            count += 1
        if not self._stopped:
            self.now = t_end
        self.processed += count
        return count

    def run(self) -> int:
        """Run until the queue drains or stop() is called."""
        q = self._queue
        pop = heapq.heappop
        count = 0
        self._stopped = False
        while q and not self._stopped:
            t, _, ev = pop(q)
            if ev.cancelled:
                continue
            self.now = t
            ev.fn(*ev.args)
            count += 1
        self.processed += count
        return count


class RngStream:
    """Independent random stream keyed by (seed, stream_id).

    Streams are derived with numpy's SeedSequence spawn keys, so adding a new
    stream id never perturbs existing ones.
    """

    def __init__(self, seed: int, stream_id: int):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.PCG64(ss))
        # bulk buffers keep per-draw overhead low in the event loop
        self._u01 = np.empty(0)
        self._u_pos = 0
        self._z = np.empty(0)
        self._z_pos = 0

    def uniform_int(self, high: int) -> int:
        """Uniform integer on [0, high]."""
        if self._u_pos >= len(self._u01):
            self._u01 = self.gen.random(256)
            self._u_pos = 0
        u = self._u01[self._u_pos]
        self._u_pos += 1
        return int(u * (high + 1))

    def standard_normal(self) -> float:
        if self._z_pos >= len(self._z):
            self._z = self.gen.standard_normal(64)
            self._z_pos = 0
        z = self._z[self._z_pos]
        self._z_pos += 1
        return float(z)


def sample_normal(stream: RngStream, mean: int, sigma: int) -> int:
    """mean + sigma*Z in nanoseconds, rounded to the nearest nanosecond.

    sigma == 0 returns mean exactly and consumes no randomness.
    """
    if sigma < 0:
        raise ConfigurationError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return mean
    return mean + int(round(sigma * stream.standard_normal()))


def sample_normal_array(stream: RngStream, n: int, mean: float, sigma: float) -> np.ndarray:
    """Vectorised draws for Monte Carlo checks; same distribution as sample_normal."""
    if sigma < 0:
        raise ConfigurationError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return np.full(n, mean, dtype=float)
    return mean + sigma * stream.gen.standard_normal(n)
