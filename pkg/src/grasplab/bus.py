"""In-process publish/subscribe channels with bounded drop-oldest queues.

Every arrow in the system wiring diagram is one named channel.  Channels are
thread-safe; under the single-threaded tick scheduler the whole bus is
deterministic, which is what the tests and the experiment harness rely on.
"""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Generic, TypeVar

T = TypeVar("T")


class UnknownChannelError(KeyError):
    pass


@dataclass(frozen=True)
class Envelope(Generic[T]):
    seq: int          # strictly increasing per channel, starts at 1
    timestamp: int    # simulation ticks (1 ms resolution)
    payload: T


class Subscription:
    """Reader handle with its own bounded queue.

    A full queue drops its oldest envelope rather than blocking the
    publisher; staleness is worse than loss for streamed frames.
    """

    def __init__(self, channel: "Channel"):
        self.channel = channel
        self._queue: deque[Envelope] = deque()
        self._cond = threading.Condition()
        self.dropped = 0
        self.active = True

    def _deliver(self, env: Envelope) -> None:
        with self._cond:
            if len(self._queue) >= self.channel.capacity:
                self._queue.popleft()
                self.dropped += 1
                self.channel.dropped += 1
            self._queue.append(env)
            self._cond.notify()

    def recv(self, block: bool = False, timeout: float | None = None) -> Envelope | None:
        """Next envelope in seq order, or None if none pending (non-blocking)."""
        with self._cond:
            if not block:
                return self._queue.popleft() if self._queue else None
            if not self._cond.wait_for(lambda: bool(self._queue), timeout):
                return None
            return self._queue.popleft()

    def drain(self) -> list[Envelope]:
        """All pending envelopes, oldest first."""
        with self._cond:
            out = list(self._queue)
            self._queue.clear()
            return out

    def latest(self) -> Envelope | None:
        """Newest pending envelope, discarding everything older."""
        with self._cond:
            if not self._queue:
                return None
            env = self._queue[-1]
            self._queue.clear()
            return env

    def __len__(self) -> int:
        with self._cond:
            return len(self._queue)


class Channel:
    def __init__(self, name: str, capacity: int, schema: str, clock: Callable[[], int]):
        if capacity < 1:
            raise ValueError("channel capacity must be positive")
        self.name = name
        self.capacity = capacity
        self.schema = schema
        self._clock = clock
        self._lock = threading.Lock()
        self._subs: list[Subscription] = []
        self._seq = 0
        self._last_ts = 0
        self.dropped = 0

    def publish(self, payload: Any) -> int:
        with self._lock:
            self._seq += 1
            # Clamp so timestamps never run backwards even if the clock is reset.
            ts = max(self._clock(), self._last_ts)
            self._last_ts = ts
            env = Envelope(self._seq, ts, payload)
            subs = list(self._subs)
        for sub in subs:
            sub._deliver(env)
        return env.seq

    def subscribe(self) -> Subscription:
        sub = Subscription(self)
        with self._lock:
            self._subs.append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)
                sub.active = False

    @property
    def subscriber_count(self) -> int:
        with self._lock:
            return len(self._subs)


class MessageBus:
    """Registry of named channels sharing one tick clock."""

    def __init__(self, clock: Callable[[], int] | None = None):
        self._channels: dict[str, Channel] = {}
        self._counter = 0
        self._clock = clock if clock is not None else self._count
        self._lock = threading.Lock()

    def _count(self) -> int:
        self._counter += 1
        return self._counter

    def set_clock(self, clock: Callable[[], int]) -> None:
        self._clock = clock
        for ch in self._channels.values():
            ch._clock = clock

    def register(self, name: str, capacity: int = 64, schema: str = "") -> Channel:
        with self._lock:
            if name in self._channels:
                raise ValueError(f"channel already registered: {name}")
            ch = Channel(name, capacity, schema, lambda: self._clock())
            self._channels[name] = ch
            return ch

    def channel(self, name: str) -> Channel:
        try:
            return self._channels[name]
        except KeyError:
            raise UnknownChannelError(name) from None

    def publish(self, name: str, payload: Any) -> int:
        return self.channel(name).publish(payload)

    def subscribe(self, name: str) -> Subscription:
        return self.channel(name).subscribe()

    def unsubscribe(self, sub: Subscription) -> None:
        sub.channel.unsubscribe(sub)

    def manifest(self) -> str:
        """Text manifest of the registry: name, payload schema id, capacity."""
        lines = ["# channel\tschema\tcapacity"]
        for name in sorted(self._channels):
            ch = self._channels[name]
            lines.append(f"{name}\t{ch.schema}\t{ch.capacity}")
        return "\n".join(lines) + "\n"
