"""AP, saturated STAs and sensor STAs (PCR + WUR), clock drift and duty cycling."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Callable

from .channel import Medium, Ppdu, PpduKind, TAG_SATURATED, TAG_TRANSACTION
from .codec import CodecError, WurFrame, WurFrameType, deserialize_mac
from .edca import EdcaEntity, EdcaParams, ExchangeTiming, FrameClass, respond_ack, send_data
from .kernel import ConfigurationError, RngStream, Simulator, sample_normal, us
from .metrics import EnergyLedger

AP_ID = 0


class PcrState(IntEnum):
    DOZE = 0
    SWITCHING_ON = 1
    LISTENING = 2
    TRANSMITTING = 3


class WurState(IntEnum):
    OFF = 0
    ON = 1


@dataclass(frozen=True)
class PowerProfile:
    """Power draw per radio state, in mW; switch-on delay in microseconds."""

    p_pcr_tx: float = 280.0
    p_pcr_listen: float = 100.0
    p_pcr_doze: float = 0.05
    p_wur_on: float = 0.5
    p_wur_off: float = 0.0
    pcr_switch_on_us: float = 2000.0
    p_pcr_switching: float | None = None  # None: charged at p_pcr_listen

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if v is not None and v < 0:
                raise ConfigurationError(f"{k} must be non-negative")

    def pcr_power(self, state: PcrState) -> float:
        if state == PcrState.DOZE:
            return self.p_pcr_doze
        if state == PcrState.LISTENING:
            return self.p_pcr_listen
        if state == PcrState.TRANSMITTING:
            return self.p_pcr_tx
        return self.p_pcr_listen if self.p_pcr_switching is None else self.p_pcr_switching

    def wur_power(self, state: WurState) -> float:
        return self.p_wur_on if state == WurState.ON else self.p_wur_off

    def power_fn(self) -> Callable[[PcrState, WurState], float]:
        table = {(p, w): self.pcr_power(p) + self.wur_power(w) for p in PcrState for w in WurState}
        return lambda p, w: table[(p, w)]


# -- clock drift -----------------------------------------------------------

def sigma_for_drift(ppm: float, interval_s: float) -> float:
    """Worst-case clock offset (s) accumulated over interval_s at the given ppm."""
    return ppm * 1e-6 * interval_s


class DriftedClock:
    """Maps scheduled times to actual wake times with a Gaussian shift.

    Each call draws an independent shift.  sigma applies to a wake-up that is
    reference_interval after the last synchronisation; after a beacon resync the
    shift scale shrinks in proportion to the time elapsed since the beacon.
    """

    def __init__(self, sigma_ns: int, rng: RngStream, reference_interval: int | None = None):
        if sigma_ns < 0:
            raise ConfigurationError("sigma must be non-negative")
        self.sigma = sigma_ns
        self.rng = rng
        self.reference_interval = reference_interval
        self.last_sync: int | None = None

    def effective_sigma(self, target: int) -> int:
        if self.last_sync is None or not self.reference_interval:
            return self.sigma
        elapsed = max(0, target - self.last_sync)
        return int(round(self.sigma * min(1.0, elapsed / self.reference_interval)))

    def resync(self, t: int) -> None:
        self.last_sync = t


def actual_wake_time(clock: DriftedClock, target: int, now: int = 0) -> int:
    return max(now, sample_normal(clock.rng, target, clock.effective_sigma(target)))


# -- duty cycle ------------------------------------------------------------

@dataclass(frozen=True)
class DutyCycleSchedule:
    period: int
    on_offset: int
    on_duration: int

    def __post_init__(self):
        if not 0 < self.on_duration <= self.period:
            raise ConfigurationError("duty cycle needs 0 < on_duration <= period")

    @property
    def duty_ratio(self) -> float:
        return self.on_duration / self.period

    def window_start(self, k: int) -> int:
        return k * self.period + self.on_offset


def wur_window(schedule: DutyCycleSchedule, t: int, shift: int = 0) -> WurState:
    """WUR state at true time t for a receiver whose clock runs `shift` ns late."""
    phase = (t - shift - schedule.on_offset) % schedule.period
    return WurState.ON if phase < schedule.on_duration else WurState.OFF


# -- stations ----------------------------------------------------------------

class SaturatedSta:
    """Full-buffer legacy station: always has a DATA frame for the AP."""

    def __init__(self, sid: int, sim: Simulator, medium: Medium, params: EdcaParams,
                 rng: RngStream, timing: ExchangeTiming):
        self.sid = sid
        self.sim = sim
        self.medium = medium
        self.timing = timing
        self.edca = EdcaEntity(sim, medium, sid, params, rng, self._grant)
        self.active = False
        self.in_exchange = False
        self.delivered = 0
        self.failed = 0
        medium.receivers[sid] = self

    def start(self) -> None:
        self.active = True
        if not self.in_exchange:
            self.edca.acquire()

    def stop(self) -> None:
        self.active = False
        if self.edca.contending:
            self.edca.abandon()

    def _grant(self) -> None:
        self.in_exchange = True
        send_data(self.medium, self.sid, AP_ID, self.timing, self._result, tag=TAG_SATURATED)

    def _result(self, ok: bool, _data: Ppdu) -> None:
        self.in_exchange = False
        self.edca.on_outcome(FrameClass.DATA, ok)
        if ok:
            self.delivered += 1
        else:
            self.failed += 1
        if self.active:
            self.edca.acquire()

    def receive(self, ppdu: Ppdu) -> bool:
        return ppdu.kind is not PpduKind.WUR


class SaturationGate:
    """Runs saturated traffic only around sensor/AP activity.

    Each expected activity opens the gate `warmup` ns before it begins; the
    gate closes when every activity has been released.  With enabled=False the
    saturated stations contend for the whole run.
    """

    def __init__(self, sim: Simulator, stations: list[SaturatedSta], warmup: int, enabled: bool = True):
        self.sim = sim
        self.stations = stations
        self.warmup = warmup
        self.enabled = enabled
        self.count = 0
        self.open = False
        self.opened_ns = 0
        self._opened_at = 0
        if not enabled:
            for s in stations:
                s.start()
            self.open = True

    def expect(self, t_begin: int) -> None:
        if not self.enabled:
            return
        self.sim.schedule(max(self.sim.now, t_begin - self.warmup), self._inc)

    def _inc(self) -> None:
        self.count += 1
        if not self.open:
            self.open = True
            self._opened_at = self.sim.now
            for s in self.stations:
                s.start()

    def release(self) -> None:
        if not self.enabled:
            return
        self.count -= 1
        if self.count < 0:
            raise ConfigurationError("saturation gate released more often than expected")
        if self.count == 0 and self.open:
            self.open = False
            self.opened_ns += self.sim.now - self._opened_at
            for s in self.stations:
                s.stop()


class AccessPoint:
    """AP: ACKs every DATA addressed to it and serves a FIFO of channel-access jobs.

    A job exposes on_grant(ap) and may implement on_ppdu_begin/on_ppdu_end/on_data.
    """

    def __init__(self, sim: Simulator, medium: Medium, params: EdcaParams, rng: RngStream,
                 timing: ExchangeTiming):
        self.sid = AP_ID
        self.sim = sim
        self.medium = medium
        self.timing = timing
        self.edca = EdcaEntity(sim, medium, AP_ID, params, rng, self._grant)
        self.jobs: deque = deque()
        self.current = None
        self._retry_ev = None
        medium.receivers[AP_ID] = self
        medium.observers.append(self)

    def submit(self, job) -> None:
        self.jobs.append(job)
        if self.current is None:
            self._next()

    def _next(self) -> None:
        if self.current is None and self.jobs:
            self.current = self.jobs.popleft()
            self.edca.acquire()

    def _grant(self) -> None:
        self.current.on_grant(self)

    def job_done(self) -> None:
        self.edca.on_outcome(FrameClass.CONTROL, True)
        self.current = None
        self._next()

    def job_retry(self, frame_class: FrameClass = FrameClass.CONTROL, failed: bool = True,
                  at: int | None = None) -> None:
        """Re-contend for the current job, now or at time `at`."""
        self.edca.on_outcome(frame_class, not failed)
        if at is None or at <= self.sim.now:
            self.edca.acquire()
        else:
            self._retry_ev = self.sim.schedule(at, self.edca.acquire)

    def transmit(self, ppdu: Ppdu) -> None:
        self.medium.begin_tx(ppdu)

    def receive(self, ppdu: Ppdu) -> bool:
        if ppdu.kind is PpduKind.WUR:
            return False
        if ppdu.kind is PpduKind.LEGACY_DATA and ppdu.dest == AP_ID:
            respond_ack(self.medium, AP_ID, ppdu, self.timing)
            if self.current is not None and hasattr(self.current, "on_data"):
                self.current.on_data(ppdu)
        return True

    def on_ppdu_begin(self, ppdu: Ppdu) -> None:
        if self.current is not None and hasattr(self.current, "on_ppdu_begin"):
            self.current.on_ppdu_begin(ppdu)

    def on_ppdu_end(self, ppdu: Ppdu) -> None:
        if self.current is not None and hasattr(self.current, "on_ppdu_end"):
            self.current.on_ppdu_end(ppdu)


class WurAction(Enum):
    NONE = "none"
    WAKE = "wake"
    RESYNC = "resync"


def process_wur_frame(address: int, frame: WurFrame, group_addresses: frozenset = frozenset()) -> WurAction:
    """Decide what a sensor does with a correctly received WUR frame."""
    if frame.frame_type is WurFrameType.WUR_BEACON:
        return WurAction.RESYNC
    if frame.frame_type is WurFrameType.WAKE_UP and (
            frame.address == address or frame.address in group_addresses):
        return WurAction.WAKE
    return WurAction.NONE


class SensorSta:
    """Battery sensor with a primary radio (PCR) and a receive-only WUR.

    Radio state changes go through set_pcr/set_wur so the energy ledger has no
    gaps.  Behaviour on receptions is delegated to `handler`, which the method
    choreography installs.
    """

    def __init__(self, sid: int, index: int, sim: Simulator, medium: Medium, power: PowerProfile,
                 clock: DriftedClock, params: EdcaParams, backoff_rng: RngStream,
                 timing: ExchangeTiming, address: int | None = None,
                 group_addresses: frozenset = frozenset()):
        self.sid = sid
        self.index = index
        self.sim = sim
        self.medium = medium
        self.power = power
        self.clock = clock
        self.timing = timing
        self.address = (sid if address is None else address) & 0xFFF
        self.group_addresses = group_addresses
        self.pcr = PcrState.DOZE
        self.wur = WurState.OFF
        self.pcr_listen_since: int | None = None
        self.wur_on_since: int | None = None
        self.ledger = EnergyLedger(sim.now, self.pcr, self.wur)
        self.edca = EdcaEntity(sim, medium, sid, params, backoff_rng, self._grant)
        self.handler = None
        self.switch_on_ns = us(power.pcr_switch_on_us)
        self.resyncs = 0

    # -- radio state ---------------------------------------------------
    def _registration(self) -> None:
        if self.pcr == PcrState.LISTENING or self.wur == WurState.ON:
            self.medium.receivers[self.sid] = self
        else:
            self.medium.receivers.pop(self.sid, None)

    def set_pcr(self, state: PcrState) -> None:
        now = self.sim.now
        if state == PcrState.LISTENING and self.pcr != PcrState.LISTENING:
            self.pcr_listen_since = now
        elif state != PcrState.LISTENING:
            self.pcr_listen_since = None
        if state in (PcrState.LISTENING, PcrState.TRANSMITTING) and self.wur == WurState.ON:
            self.wur = WurState.OFF
            self.wur_on_since = None
        self.pcr = state
        self.ledger.record(now, self.pcr, self.wur)
        self._registration()

    def set_wur(self, state: WurState) -> None:
        if state == WurState.ON and self.pcr in (PcrState.LISTENING, PcrState.TRANSMITTING):
            raise ConfigurationError("WUR can only be on while the PCR is off")
        now = self.sim.now
        if state == WurState.ON and self.wur != WurState.ON:
            self.wur_on_since = now
        elif state == WurState.OFF:
            self.wur_on_since = None
        self.wur = state
        self.ledger.record(now, self.pcr, self.wur)
        self._registration()

    def pcr_power_on(self, on_ready: Callable[[], None] | None = None) -> int:
        """Start switching the PCR on; returns the time it will be listening."""
        if self.pcr != PcrState.DOZE:
            raise ConfigurationError("PCR must be dozing to power on")
        ready = self.sim.now + self.switch_on_ns
        if self.switch_on_ns == 0:
            self.set_pcr(PcrState.LISTENING)
            if on_ready:
                on_ready()
            return ready
        self.set_pcr(PcrState.SWITCHING_ON)
        self.sim.schedule(ready, self._ready, on_ready)
        return ready

    def _ready(self, on_ready) -> None:
        self.set_pcr(PcrState.LISTENING)
        if on_ready:
            on_ready()

    def doze(self) -> None:
        if self.edca.contending:
            self.edca.abandon()
        self.set_pcr(PcrState.DOZE)

    def listening_since(self, t: int) -> bool:
        s = self.pcr_listen_since
        return s is not None and s <= t

    # -- transmit ------------------------------------------------------
    def send_data(self, on_result: Callable[[bool, Ppdu], None], exchange=None) -> Ppdu:
        self.set_pcr(PcrState.TRANSMITTING)
        data = send_data(self.medium, self.sid, AP_ID, self.timing, on_result, tag=TAG_TRANSACTION,
                         exchange=exchange, is_listening=self.listening_since)
        prev_end = data.on_end

        def data_end(p: Ppdu) -> None:
            self.set_pcr(PcrState.LISTENING)
            prev_end(p)

        data.on_end = data_end
        return data

    def contend(self) -> None:
        self.edca.acquire()

    def _grant(self) -> None:
        self.handler.on_grant(self)

    # -- receive -------------------------------------------------------
    def receive(self, ppdu: Ppdu) -> bool:
        if ppdu.kind is PpduKind.WUR:
            since = self.wur_on_since
            if since is None or since > ppdu.start:
                return False
            try:
                frame = deserialize_mac(ppdu.frame)
            except CodecError:
                return False
            action = process_wur_frame(self.address, frame, self.group_addresses)
            if action is WurAction.RESYNC:
                self.apply_beacon_resync(frame.td_control)
            if self.handler is not None:
                self.handler.on_wur_frame(self, frame, action, ppdu)
            return True
        if not self.listening_since(ppdu.start):
            return False
        if self.handler is not None:
            self.handler.on_legacy(self, ppdu)
        return True

    def apply_beacon_resync(self, partial_timestamp: int) -> None:
        """Clear accumulated drift: later wake-ups are drawn relative to now."""
        self.clock.resync(self.sim.now)
        self.resyncs += 1
