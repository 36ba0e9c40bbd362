"""Single collision domain: transmissions, physical/virtual carrier sense, corruption."""

from __future__ import annotations

from enum import Enum
from typing import Any, Callable

from .kernel import Simulator


class ModelError(RuntimeError):
    """The simulation reached a state the model forbids."""


class PpduKind(Enum):
    LEGACY_DATA = "data"
    LEGACY_CONTROL = "control"
    WUR = "wur"


class Cca(Enum):
    IDLE = "idle"
    BUSY = "busy"


# Ppdu.tag values
TAG_SATURATED = "sat"
TAG_TRANSACTION = "txn"  # sensor or AP traffic that counts toward channel time


class Ppdu:
    """One on-air transmission.  start/end are filled in by Medium.begin_tx."""

    __slots__ = ("source", "kind", "duration", "start", "end", "nav", "dest", "corrupted",
                 "tag", "exchange", "label", "frame", "on_end", "response")

    def __init__(self, source: int, kind: PpduKind, duration: int, *, nav: int = 0,
                 dest: int | None = None, tag: str = TAG_SATURATED, exchange: Any = None,
                 label: str = "", frame: Any = None,
                 on_end: Callable[["Ppdu"], None] | None = None):
        if duration <= 0:
            raise ModelError("PPDU duration must be positive")
        self.source = source
        self.kind = kind
        self.duration = duration
        self.start = -1
        self.end = -1
        self.nav = nav
        self.dest = dest
        self.corrupted = False
        self.tag = tag
        self.exchange = exchange
        self.label = label or kind.value
        self.frame = frame
        self.on_end = on_end
        self.response: Ppdu | None = None  # immediate response (ACK) scheduled by the receiver

    def __repr__(self) -> str:
        return (f"Ppdu({self.label} src={self.source} [{self.start},{self.end})"
                f"{' corrupted' if self.corrupted else ''})")


class Medium:
    """Broadcast medium shared by every station (all mutually in range).

    Listeners (contending EDCA entities) get on_medium(busy) callbacks whenever
    their combined physical + NAV + reservation-block state flips.  Receivers get
    receive(ppdu) -> decoded for each uncorrupted PPDU end.
    """

    def __init__(self, sim: Simulator, trace: Callable[[str], None] | None = None):
        self.sim = sim
        self.trace = trace
        self.active: list[Ppdu] = []
        self.nav: dict[int, int] = {}
        self.blocked: set[int] = set()
        self.records: list[Ppdu] = []
        self._listeners: dict[int, Any] = {}
        self._listener_state: dict[int, bool] = {}
        self.receivers: dict[int, Any] = {}
        self.observers: list[Any] = []
        self._nav_events: dict[int, Any] = {}

    # -- carrier sense -------------------------------------------------
    def physical_busy(self) -> bool:
        now = self.sim.now
        for p in self.active:
            if p.end > now:
                return True
        return False

    def busy(self, sid: int) -> bool:
        if self.physical_busy():
            return True
        if self.nav.get(sid, 0) > self.sim.now:
            return True
        return sid in self.blocked

    def cca(self, sid: int) -> Cca:
        return Cca.BUSY if self.busy(sid) else Cca.IDLE

    def add_listener(self, sid: int, obj: Any) -> bool:
        """Register a contender; returns its current busy state."""
        b = self.busy(sid)
        self._listeners[sid] = obj
        self._listener_state[sid] = b
        return b

    def remove_listener(self, sid: int) -> None:
        self._listeners.pop(sid, None)
        self._listener_state.pop(sid, None)

    def _reevaluate(self) -> None:
        if not self._listeners:
            return
        now = self.sim.now
        phys = False
        for p in self.active:
            if p.end > now:
                phys = True
                break
        nav = self.nav
        blocked = self.blocked
        state = self._listener_state
        for sid, obj in list(self._listeners.items()):
            if sid not in state:
                continue
            b = phys or nav.get(sid, 0) > now or sid in blocked
            if b != state[sid]:
                state[sid] = b
                obj.on_medium(b)

    # -- virtual carrier sense -----------------------------------------
    def set_nav(self, sid: int, until: int) -> None:
        if until <= self.nav.get(sid, 0):
            return
        self.nav[sid] = until
        if until not in self._nav_events:
            self._nav_events[until] = self.sim.schedule(until, self._nav_expired, until)

    def _nav_expired(self, t: int) -> None:
        del self._nav_events[t]
        self._reevaluate()

    def block(self, sids) -> None:
        self.blocked.update(sids)
        self._reevaluate()

    def unblock(self, sids) -> None:
        self.blocked.difference_update(sids)
        self._reevaluate()

    # -- transmissions -------------------------------------------------
    def begin_tx(self, ppdu: Ppdu) -> None:
        now = self.sim.now
        for p in self.active:
            if p.source == ppdu.source and p.end > now:
                raise ModelError(f"station {ppdu.source} is already transmitting")
        ppdu.start = now
        ppdu.end = now + ppdu.duration
        for p in self.active:
            if p.end > now:
                p.corrupted = True
                ppdu.corrupted = True
        self.active.append(ppdu)
        self.sim.schedule(ppdu.end, self._end, ppdu)
        if self.trace:
            self.trace(f"{now} BEGIN {ppdu.source} {ppdu.label} {ppdu.duration}")
        for obs in self.observers:
            obs.on_ppdu_begin(ppdu)
        self._reevaluate()

    def _end(self, ppdu: Ppdu) -> None:
        self.active.remove(ppdu)
        self.records.append(ppdu)
        if self.trace:
            self.trace(f"{ppdu.end} END {ppdu.source} {ppdu.label}"
                       f"{' CORRUPT' if ppdu.corrupted else ''}")
        if not ppdu.corrupted:
            legacy_nav = ppdu.nav > 0 and ppdu.kind is not PpduKind.WUR
            for sid, st in list(self.receivers.items()):
                if sid == ppdu.source:
                    continue
                if st.receive(ppdu) and legacy_nav and sid != ppdu.dest:
                    self.set_nav(sid, ppdu.end + ppdu.nav)
        if ppdu.on_end is not None:
            ppdu.on_end(ppdu)
        for obs in self.observers:
            obs.on_ppdu_end(ppdu)
        self._reevaluate()


def busy_fraction(records: list[Ppdu], t0: int, t1: int) -> float:
    """Fraction of [t0, t1) covered by at least one PPDU."""
    spans = sorted((max(p.start, t0), min(p.end, t1)) for p in records if p.end > t0 and p.start < t1)
    covered = 0
    cur_s = cur_e = None
    for s, e in spans:
        if cur_e is None or s > cur_e:
            if cur_e is not None:
                covered += cur_e - cur_s
            cur_s, cur_e = s, e
        else:
            cur_e = max(cur_e, e)
    if cur_e is not None:
        covered += cur_e - cur_s
    return covered / (t1 - t0)
