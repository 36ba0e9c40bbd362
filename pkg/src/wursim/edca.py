"""EDCA contention with truncated binary exponential backoff, plus the DATA/ACK exchange."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .channel import Medium, Ppdu, PpduKind, TAG_SATURATED
from .kernel import RngStream, Simulator, us


class FrameClass(Enum):
    DATA = "data"
    CONTROL = "control"
    WUR = "wur"


class EdcaState(Enum):
    IDLE = "idle"
    DEFERRING = "deferring"
    BACKING_OFF = "backing_off"
    TRANSMITTING = "transmitting"


@dataclass(frozen=True)
class EdcaParams:
    aifsn: int = 3
    cw_min: int = 15
    cw_max: int = 1023
    slot_us: float = 9
    sifs_us: float = 16

    def __post_init__(self):
        for name in ("cw_min", "cw_max"):
            v = getattr(self, name)
            if v < 0 or (v + 1) & v:
                raise ValueError(f"{name}+1 must be a power of two, got {v}")
        if self.cw_min > self.cw_max:
            raise ValueError("cw_min exceeds cw_max")

    @property
    def aifs_ns(self) -> int:
        return us(self.sifs_us + self.aifsn * self.slot_us)

    @property
    def slot_ns(self) -> int:
        return us(self.slot_us)


@dataclass(frozen=True)
class ExchangeTiming:
    sifs_us: float = 16
    slot_us: float = 9
    ack_us: float = 44
    cts_us: float = 44
    tf_us: float = 100
    pspoll_us: float = 44
    data_us: float = 1480

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if v <= 0:
                raise ValueError(f"{k} must be positive")

    @property
    def exchange_us(self) -> float:
        """Successful DATA + SIFS + ACK."""
        return self.data_us + self.sifs_us + self.ack_us

    @property
    def sifs(self) -> int:
        return us(self.sifs_us)

    @property
    def ack(self) -> int:
        return us(self.ack_us)

    @property
    def data(self) -> int:
        return us(self.data_us)

    @property
    def exchange(self) -> int:
        return us(self.exchange_us)


class EdcaEntity:
    """One backoff entity.

    acquire() starts contention: AIFS of idle medium, then one decrement per idle
    slot, frozen while the medium is busy.  on_grant() is called when the counter
    reaches zero.  The counter is drawn uniform on [0, cw] when a new attempt
    starts and survives freezes.
    """

    __slots__ = ("sim", "medium", "sid", "params", "rng", "on_grant", "cw", "retry_count",
                 "counter", "state", "_cd_start", "_ev", "_aifs", "_slot", "grants")

    def __init__(self, sim: Simulator, medium: Medium, sid: int, params: EdcaParams,
                 rng: RngStream, on_grant: Callable[[], None]):
        self.sim = sim
        self.medium = medium
        self.sid = sid
        self.params = params
        self.rng = rng
        self.on_grant = on_grant
        self.cw = params.cw_min
        self.retry_count = 0
        self.counter: int | None = None
        self.state = EdcaState.IDLE
        self._cd_start: int | None = None
        self._ev = None
        self._aifs = params.aifs_ns
        self._slot = params.slot_ns
        self.grants = 0

    @property
    def contending(self) -> bool:
        return self.state in (EdcaState.DEFERRING, EdcaState.BACKING_OFF)

    def acquire(self) -> None:
        if self.contending:
            return
        if self.counter is None:
            self.counter = self.rng.uniform_int(self.cw)
        busy = self.medium.add_listener(self.sid, self)
        if busy:
            self.state = EdcaState.DEFERRING
        else:
            self._start_countdown(self.sim.now)

    def abandon(self) -> None:
        """Drop the pending attempt (counter discarded)."""
        if self._ev is not None:
            self._ev.cancel()
            self._ev = None
        self.medium.remove_listener(self.sid)
        self.counter = None
        self._cd_start = None
        if self.contending:
            self.state = EdcaState.IDLE

    def _start_countdown(self, t: int) -> None:
        self.state = EdcaState.BACKING_OFF
        self._cd_start = t + self._aifs
        self._ev = self.sim.schedule(self._cd_start + self.counter * self._slot, self._fire)

    def on_medium(self, busy: bool) -> None:
        now = self.sim.now
        if busy:
            ev = self._ev
            if ev is None:
                self.state = EdcaState.DEFERRING
                return
            if ev.time == now:
                return  # same-slot transmission: both go ahead and collide
            ev.cancel()
            self._ev = None
            if now > self._cd_start:
                self.counter -= (now - self._cd_start) // self._slot
            self._cd_start = None
            self.state = EdcaState.DEFERRING
        else:
            if self._ev is None:
                self._start_countdown(now)

    def _fire(self) -> None:
        self._ev = None
        self._cd_start = None
        self.counter = None
        self.medium.remove_listener(self.sid)
        self.state = EdcaState.TRANSMITTING
        self.grants += 1
        self.on_grant()

    def on_outcome(self, frame_class: FrameClass, success: bool) -> None:
        """Contention-window update after an attempt.

        WUR frames are sent without acknowledgment and never change cw or the
        retry counter.
        """
        if self.state is EdcaState.TRANSMITTING:
            self.state = EdcaState.IDLE
        if frame_class is FrameClass.WUR:
            return
        if success:
            self.cw = self.params.cw_min
            self.retry_count = 0
        else:
            self.cw = min(2 * self.cw + 1, self.params.cw_max)
            self.retry_count += 1


def send_data(medium: Medium, source: int, dest: int, timing: ExchangeTiming,
              on_result: Callable[[bool, Ppdu], None], *, tag: str = TAG_SATURATED,
              exchange=None, is_listening: Callable[[int], bool] | None = None) -> Ppdu:
    """Transmit DATA and report success once the ACK ends (or the ACK timeout passes).

    The receiving station is expected to call respond_ack() from its receive().
    is_listening(t) tells whether the sender's receiver was on since t.
    """
    sim = medium.sim

    def ack_end(ack: Ppdu) -> None:
        ok = not ack.corrupted and (is_listening is None or is_listening(ack.start))
        on_result(ok, data)

    def data_end(p: Ppdu) -> None:
        if p.response is not None:
            p.response.on_end = ack_end
        else:
            sim.schedule_in(timing.sifs + timing.ack, on_result, False, p)

    data = Ppdu(source, PpduKind.LEGACY_DATA, timing.data, nav=timing.sifs + timing.ack,
                dest=dest, tag=tag, exchange=exchange, label="DATA", on_end=data_end)
    medium.begin_tx(data)
    return data


def respond_ack(medium: Medium, responder: int, data: Ppdu, timing: ExchangeTiming) -> Ppdu:
    """Schedule an ACK SIFS after a correctly received DATA."""
    ack = Ppdu(responder, PpduKind.LEGACY_CONTROL, timing.ack, dest=data.source,
               tag=data.tag, exchange=data.exchange, label="ACK")
    data.response = ack
    medium.sim.schedule_in(timing.sifs, _begin_response, medium, ack)
    return ack


def _begin_response(medium: Medium, ppdu: Ppdu) -> None:
    now = medium.sim.now
    for p in medium.active:
        if p.source == ppdu.source and p.end > now:
            # responder is itself on air (cannot happen with AIFS > SIFS); drop it
            ppdu.corrupted = True
            if ppdu.on_end:
                ppdu.on_end(ppdu)
            return
    medium.begin_tx(ppdu)
