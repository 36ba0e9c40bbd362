"""The four uplink delivery methods as event choreographies.

TWT_PLAIN  sensor wakes at its drifted target and contends with EDCA.
TWT_TF     sensor wakes and listens; the AP contends at target + guard and
           sends a trigger frame; the sensor answers after SIFS.
TWT_GUARD  sensors of a group get back-to-back slots inside a reservation that
           starts guard before the first target; saturated STAs stay silent.
WUR_CTS    sensor's WUR opens at the drifted target; at target + guard the AP
           contends, sends CTS-to-self then a wake-up frame; the sensor
           switches its PCR on and sends DATA under NAV protection.

guard = guard_factor * sigma (4 sigma by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Callable

import numpy as np

from .channel import Medium, Ppdu, PpduKind, TAG_TRANSACTION
from .codec import DataRate, WurFrame, WurFrameType, ppdu_airtime, serialize_mac
from .edca import EdcaParams, EdcaState, ExchangeTiming, FrameClass
from .kernel import (ConfigurationError, RngStream, Simulator, sample_normal_array, seconds,
                     to_seconds, us)
from .metrics import ChannelBreakdown, ChannelLedger, channel_time_per_frame
from .stations import (AP_ID, AccessPoint, DriftedClock, DutyCycleSchedule, PcrState,
                       SaturatedSta, SaturationGate, SensorSta, WurAction,
                       WurState, actual_wake_time)

if TYPE_CHECKING:
    from .config import ScenarioConfig


class MethodKind(Enum):
    TWT_PLAIN = "twt_plain"
    TWT_TF = "twt_tf"
    TWT_GUARD = "twt_guard"
    WUR_CTS = "wur_cts"

    @classmethod
    def parse(cls, name: str) -> "MethodKind":
        key = name.strip().lower().replace("-", "_")
        aliases = {"1": cls.TWT_PLAIN, "2": cls.TWT_TF, "3": cls.TWT_GUARD, "4": cls.WUR_CTS}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown method {name!r}") from None


# stream ids: role base + 4 * index + purpose
STREAM_BACKOFF = 0
STREAM_DRIFT = 1
_ROLE_AP = 0
_ROLE_SENSOR = 1 << 20
_ROLE_SATURATED = 2 << 20


def stream_id(role: str, index: int, purpose: int) -> int:
    base = {"ap": _ROLE_AP, "sensor": _ROLE_SENSOR, "saturated": _ROLE_SATURATED}[role]
    return base + 4 * index + purpose


def received_if_on_since(on_since: int | None, ppdu_start: int) -> bool:
    """A receiver decodes a PPDU only if its radio was on at the PPDU start."""
    return on_since is not None and on_since <= ppdu_start


# -- schedules -------------------------------------------------------------

@dataclass(frozen=True)
class TwtSchedule:
    """targets[r][i]: target time of sensor i in round r (ns)."""

    targets: list[list[int]]
    spacing: int
    period: int
    guard: int
    reservation_starts: list[int] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.targets)


def build_schedule(cfg: "ScenarioConfig", method: MethodKind, sigma_s: float) -> TwtSchedule:
    """Per-sensor target times.

    Methods 1/2/4: one target per sensor per round, spaced so neighbouring
    +-guard windows never overlap.  Method 3: one group per round with slots
    two DATA durations apart; the reservation starts guard before the first.
    """
    n = cfg.N
    if n <= 0:
        raise ConfigurationError("at least one sensor is required")
    sigma = seconds(sigma_s)
    guard = int(round(cfg.guard_factor * sigma))
    exchange = us(cfg.data_duration_us + cfg.sifs_us + cfg.ack_us)
    slack = us(cfg.schedule_slack_us)
    switch_on = us(cfg.pcr_switch_on_us)
    t0 = 2 * guard + us(cfg.sat_warmup_us) + switch_on + us(1000)
    rounds = math.ceil(cfg.frames / n)
    if method is MethodKind.TWT_GUARD:
        spacing = 2 * us(cfg.data_duration_us)
        needed = 2 * guard + n * spacing + exchange + slack
    else:
        spacing = 2 * guard + exchange + slack
        needed = n * spacing
    period = needed
    if cfg.twt_period_s:
        period = seconds(cfg.twt_period_s)
        if period < needed:
            raise ConfigurationError(
                f"twt_period_s={cfg.twt_period_s} is too short for {n} sensors "
                f"(needs >= {to_seconds(needed):.6f} s)")
    targets = []
    left = cfg.frames
    for r in range(rounds):
        k = min(n, left)
        targets.append([t0 + r * period + i * spacing for i in range(k)])
        left -= k
    res = [row[0] - guard for row in targets] if method is MethodKind.TWT_GUARD else []
    return TwtSchedule(targets, spacing, period, guard, res)


# -- per-run state ---------------------------------------------------------

@dataclass
class FrameRecord:
    sensor: int
    round: int
    target: int
    window_start: int | None = None
    delivered_at: int | None = None
    misses: int = 0
    energy_j: float | None = None


@dataclass
class RunResult:
    method: MethodKind
    sigma_s: float
    seed: int
    frames: list[FrameRecord]
    breakdown: ChannelBreakdown
    end_time: int
    whole_run_energy_j: float
    sat_delivered: int
    window_overruns: int
    records: list[Ppdu] | None = None
    reservations: list[tuple[int, int]] = field(default_factory=list)
    sensors: list[SensorSta] | None = None

    @property
    def delivered(self) -> list[FrameRecord]:
        return [f for f in self.frames if f.delivered_at is not None]

    @property
    def frames_delivered(self) -> int:
        return len(self.delivered)

    @property
    def undelivered(self) -> int:
        return len(self.frames) - self.frames_delivered

    @property
    def energy_per_frame(self) -> float:
        d = self.delivered
        return sum(f.energy_j for f in d) / len(d) if d else math.nan

    @property
    def channel_time_per_frame(self) -> float:
        return channel_time_per_frame(self.breakdown.total, self.frames_delivered)

    @property
    def delay_per_frame(self) -> float:
        d = self.delivered
        return sum(f.delivered_at - f.target for f in d) / len(d) * 1e-9 if d else math.nan

    @property
    def misses(self) -> int:
        return sum(f.misses for f in self.frames)


class Network:
    """Stations, medium and ledgers for one simulation run."""

    def __init__(self, cfg: "ScenarioConfig", method: MethodKind, sigma_s: float, seed: int,
                 trace: Callable[[str], None] | None = None):
        if sigma_s < 0:
            raise ConfigurationError("sigma must be non-negative")
        self.cfg = cfg
        self.method = method
        self.sigma_s = sigma_s
        self.seed = seed
        self.sim = Simulator()
        self.medium = Medium(self.sim, trace)
        self.timing = ExchangeTiming(cfg.sifs_us, cfg.slot_us, cfg.ack_us, cfg.cts_us, cfg.tf_us,
                                     cfg.pspoll_us, cfg.data_duration_us)
        self.params = EdcaParams(cfg.aifsn, cfg.cw_min, cfg.cw_max, cfg.slot_us, cfg.sifs_us)
        self.power = cfg.power_profile()
        self.power_fn = self.power.power_fn()
        self.rate = DataRate(cfg.wur_rate)
        self.schedule = build_schedule(cfg, method, sigma_s)
        self.sigma = seconds(sigma_s)
        self.guard = self.schedule.guard
        self.channel = ChannelLedger()

        self.ap = AccessPoint(self.sim, self.medium, self.params,
                              RngStream(seed, stream_id("ap", 0, STREAM_BACKOFF)), self.timing)
        self.sensors: list[SensorSta] = []
        for i in range(cfg.N):
            clock = DriftedClock(self.sigma, RngStream(seed, stream_id("sensor", i, STREAM_DRIFT)),
                                 reference_interval=self.schedule.period)
            self.sensors.append(SensorSta(
                1 + i, i, self.sim, self.medium, self.power, clock, self.params,
                RngStream(seed, stream_id("sensor", i, STREAM_BACKOFF)), self.timing,
                address=1 + i))
        self.saturated = [
            SaturatedSta(1 + cfg.N + j, self.sim, self.medium, self.params,
                         RngStream(seed, stream_id("saturated", j, STREAM_BACKOFF)), self.timing)
            for j in range(cfg.M)
        ]
        self.gate = SaturationGate(self.sim, self.saturated, us(cfg.sat_warmup_us), cfg.sat_gating)

        self.frames: list[FrameRecord] = []
        self.by_sensor: list[list[FrameRecord]] = [[] for _ in range(cfg.N)]
        for r, row in enumerate(self.schedule.targets):
            for i, t in enumerate(row):
                fr = FrameRecord(i, r, t)
                self.frames.append(fr)
                self.by_sensor[i].append(fr)
        self.remaining = len(self.frames)
        self.window_overruns = 0
        self._exchange_seq = 0

    def next_exchange(self, tag: str) -> tuple[str, int]:
        self._exchange_seq += 1
        return (tag, self._exchange_seq)

    @property
    def miss_timeout(self) -> int:
        if self.cfg.miss_timeout_us:
            return us(self.cfg.miss_timeout_us)
        return 2 * us(self.cfg.pcr_switch_on_us) + self.timing.exchange

    def horizon(self) -> int:
        last = self.schedule.targets[-1][-1] if self.schedule.targets else 0
        return last + 2 * self.schedule.period + 8 * self.guard + seconds(10)

    def frame_delivered(self, fr: FrameRecord) -> None:
        fr.delivered_at = self.sim.now
        self.remaining -= 1
        if self.remaining == 0:
            self.sim.stop()


class Choreography:
    """Per-sensor frame sequencing shared by the four methods."""

    def __init__(self, net: Network):
        self.net = net
        self.sim = net.sim
        self.pending: dict[int, FrameRecord] = {}
        self._next_idx = [0] * len(net.sensors)
        for s in net.sensors:
            s.handler = self

    def start(self) -> None:
        for s in self.net.sensors:
            self.arm_next(s)

    def arm_next(self, sensor: SensorSta) -> None:
        k = self._next_idx[sensor.index]
        frames = self.net.by_sensor[sensor.index]
        if k < len(frames):
            self._next_idx[sensor.index] = k + 1
            self.arm(sensor, frames[k])

    def arm(self, sensor: SensorSta, fr: FrameRecord) -> None:
        raise NotImplementedError

    def deliver(self, sensor: SensorSta, fr: FrameRecord) -> None:
        self.pending.pop(sensor.index, None)
        sensor.doze()
        self.net.frame_delivered(fr)
        self.net.gate.release()
        self.arm_next(sensor)

    def wake_pcr_at(self, sensor: SensorSta, fr: FrameRecord, on_ready: Callable[[], None]) -> int:
        """Draw the drifted wake instant (PCR ready) and schedule switch-on ahead of it."""
        d = sensor.switch_on_ns
        wake = actual_wake_time(sensor.clock, fr.target, self.sim.now + d)
        fr.window_start = wake - d
        self.pending[sensor.index] = fr
        self.sim.schedule(wake - d, sensor.pcr_power_on, on_ready)
        return wake

    # default sensor callbacks
    def on_grant(self, sensor: SensorSta) -> None:
        fr = self.pending[sensor.index]
        sensor.send_data(lambda ok, p: self.on_data_result(sensor, fr, ok),
                         exchange=self.net.next_exchange("data"))

    def on_data_result(self, sensor: SensorSta, fr: FrameRecord, ok: bool) -> None:
        sensor.edca.on_outcome(FrameClass.DATA, ok)
        if ok:
            self.deliver(sensor, fr)
        else:
            sensor.contend()

    def on_legacy(self, sensor: SensorSta, ppdu: Ppdu) -> None:
        pass

    def on_wur_frame(self, sensor, frame, action, ppdu) -> None:
        pass


class TwtPlain(Choreography):
    def arm(self, sensor, fr):
        wake = self.wake_pcr_at(sensor, fr, sensor.contend)
        self.net.gate.expect(wake)


class TwtGuard(Choreography):
    """Reservation per round; sensors defer only to each other inside it."""

    def __init__(self, net):
        super().__init__(net)
        self.group_left: dict[int, int] = {}
        self.res_start: dict[int, int] = {}
        self.immediate = net.cfg.guard_access == "immediate"
        self._armed_rounds: set[int] = set()

    def arm(self, sensor, fr):
        net = self.net
        r = fr.round
        if r not in self._armed_rounds:
            self._armed_rounds.add(r)
            start = net.schedule.reservation_starts[r]
            block_at = max(self.sim.now, start - net.timing.exchange)
            self.group_left[r] = len(net.schedule.targets[r])
            self.res_start[r] = start
            net.gate.expect(block_at)
            self.sim.schedule(block_at, self._block)
        self.wake_pcr_at(sensor, fr, lambda: self._ready(sensor))

    def _block(self):
        self.net.medium.block(s.sid for s in self.net.saturated)
        self.net.gate.release()

    def _ready(self, sensor):
        if self.immediate and not self.net.medium.busy(sensor.sid):
            sensor.edca.state = EdcaState.TRANSMITTING
            self.on_grant(sensor)
        else:
            sensor.contend()

    def deliver(self, sensor, fr):
        r = fr.round
        self.group_left[r] -= 1
        if self.group_left[r] == 0:
            self.net.channel.add_reservation(self.res_start[r], self.sim.now)
            self.net.medium.unblock(s.sid for s in self.net.saturated)
        self.pending.pop(sensor.index, None)
        sensor.doze()
        self.net.frame_delivered(fr)
        self.arm_next(sensor)


class _ApJob:
    """AP-side transaction for one sensor frame (TF or CTS + wake-up)."""

    def __init__(self, chor: "Choreography", sensor: SensorSta, fr: FrameRecord):
        self.chor = chor
        self.net = chor.net
        self.sensor = sensor
        self.fr = fr
        self.responded = False
        self.attempt = 0

    def on_ppdu_begin(self, p: Ppdu) -> None:
        if p.source == self.sensor.sid:
            self.responded = True

    def on_ppdu_end(self, p: Ppdu) -> None:
        if p.source == self.sensor.sid and p.kind is PpduKind.LEGACY_DATA:
            self.data_end(p)


class TfJob(_ApJob):
    def on_grant(self, ap: AccessPoint) -> None:
        t = self.net.timing
        self.responded = False
        self.attempt += 1
        self.exchange = self.net.next_exchange("tf")
        tf = Ppdu(AP_ID, PpduKind.LEGACY_CONTROL, us(t.tf_us),
                  nav=t.sifs + t.data + t.sifs + t.ack, dest=self.sensor.sid,
                  tag=TAG_TRANSACTION, exchange=self.exchange, label="TF", on_end=self.tf_end)
        ap.transmit(tf)
        self.ready = received_if_on_since(self.sensor.pcr_listen_since, tf.start)

    def tf_end(self, tf: Ppdu) -> None:
        if not tf.corrupted and not self.ready:
            self.fr.misses += 1
        t = self.net.timing
        self.net.sim.schedule_in(t.sifs + us(t.slot_us), self.check, tf.end)

    def check(self, tf_end: int) -> None:
        if self.responded:
            return
        ap = self.net.ap
        if self.net.medium.physical_busy():
            ap.job_retry(FrameClass.CONTROL, failed=True)
        else:
            ap.job_retry(FrameClass.WUR, at=tf_end + self.net.miss_timeout)

    def data_end(self, p: Ppdu) -> None:
        if p.corrupted:
            self.net.ap.job_retry(FrameClass.CONTROL, failed=True)
        else:
            self.net.ap.job_done()


class TwtWithTf(Choreography):
    def arm(self, sensor, fr):
        self.wake_pcr_at(sensor, fr, None)
        start = fr.target + self.net.guard
        self.net.gate.expect(start)
        self.sim.schedule(max(self.sim.now, start), self.net.ap.submit, TfJob(self, sensor, fr))

    def on_legacy(self, sensor, ppdu):
        if ppdu.label == "TF" and ppdu.dest == sensor.sid and sensor.index in self.pending:
            fr = self.pending[sensor.index]
            self.sim.schedule_in(self.net.timing.sifs, self._respond, sensor, fr, ppdu.exchange)

    def _respond(self, sensor, fr, exchange):
        sensor.send_data(lambda ok, p: self._result(sensor, fr, ok), exchange=exchange)

    def _result(self, sensor, fr, ok):
        if ok:
            self.deliver(sensor, fr)
        # otherwise keep listening for the next trigger


class WurJob(_ApJob):
    def on_grant(self, ap: AccessPoint) -> None:
        net = self.net
        t = net.timing
        self.responded = False
        self.attempt += 1
        self.exchange = net.next_exchange("wur")
        frame = WurFrame(WurFrameType.WAKE_UP, self.sensor.address, 0)
        self.bits = serialize_mac(frame)
        self.wur_ns = us(ppdu_airtime(frame, net.rate).total_us)
        nav = t.sifs + self.wur_ns + self.sensor.switch_on_ns + t.data + t.sifs + t.ack
        cts = Ppdu(AP_ID, PpduKind.LEGACY_CONTROL, us(t.cts_us), nav=nav, dest=AP_ID,
                   tag=TAG_TRANSACTION, exchange=self.exchange, label="CTS", on_end=self.cts_end)
        ap.transmit(cts)

    def cts_end(self, cts: Ppdu) -> None:
        self.net.sim.schedule_in(self.net.timing.sifs, self.send_wur)

    def send_wur(self) -> None:
        net = self.net
        if net.medium.physical_busy():
            # CTS-to-self solicits no response, so a collision leaves cw unchanged
            net.ap.job_retry(FrameClass.WUR)
            return
        ppdu = Ppdu(AP_ID, PpduKind.WUR, self.wur_ns, dest=self.sensor.sid, tag=TAG_TRANSACTION,
                    exchange=self.exchange, label="WUR", frame=self.bits, on_end=self.wur_end)
        net.ap.transmit(ppdu)
        self.ready = received_if_on_since(self.sensor.wur_on_since, ppdu.start)

    def wur_end(self, p: Ppdu) -> None:
        if not p.corrupted and not self.ready:
            self.fr.misses += 1
        self.net.sim.schedule_in(self.net.miss_timeout, self.timeout, self.attempt)

    def timeout(self, attempt: int) -> None:
        if self.responded or attempt != self.attempt or self.net.ap.current is not self:
            return
        self.net.ap.job_retry(FrameClass.WUR)

    def data_end(self, p: Ppdu) -> None:
        if self.net.ap.current is self:
            self.net.ap.job_done()


class BeaconJob:
    """Broadcast WUR beacon carrying a partial timestamp."""

    def __init__(self, chor: "WurCts"):
        self.chor = chor
        self.net = chor.net

    def on_grant(self, ap: AccessPoint) -> None:
        net = self.net
        ts = (net.sim.now // 1000 >> 10) & 0xFFF  # partial TSF, 1.024 ms units
        frame = WurFrame(WurFrameType.WUR_BEACON, 0xFFF, ts)
        ppdu = Ppdu(AP_ID, PpduKind.WUR, us(ppdu_airtime(frame, net.rate).total_us),
                    tag=TAG_TRANSACTION, exchange=net.next_exchange("bcn"), label="WURBCN",
                    frame=serialize_mac(frame), on_end=self.done)
        ap.transmit(ppdu)

    def done(self, p: Ppdu) -> None:
        self.net.ap.edca.on_outcome(FrameClass.WUR, True)
        self.net.ap.current = None
        self.net.ap._next()
        self.net.gate.release()


class WurCts(Choreography):
    def __init__(self, net):
        super().__init__(net)
        self.waiting: set[int] = set()
        self.duty: dict[int, DutyCycleSchedule] = {}
        sch = net.schedule
        for s in net.sensors:
            first = sch.targets[0][s.index] if sch.targets and s.index < len(sch.targets[0]) else 0
            self.duty[s.index] = DutyCycleSchedule(sch.period, first % sch.period, sch.spacing)
        beacon = net.cfg.wur_beacon_period_s
        if beacon:
            self.beacon_period = seconds(beacon)
            self.sim.schedule(self.beacon_period, self._beacon)

    def _beacon(self):
        if self.net.remaining == 0:
            return
        self.net.gate.expect(self.sim.now)
        self.sim.schedule(self.sim.now, self.net.ap.submit, BeaconJob(self))
        self.sim.schedule(self.sim.now + self.beacon_period, self._beacon)

    def arm(self, sensor, fr):
        net = self.net
        wake = actual_wake_time(sensor.clock, fr.target, self.sim.now)
        fr.window_start = wake
        self.pending[sensor.index] = fr
        self.sim.schedule(wake, self._open, sensor, fr)
        self.sim.schedule(wake + self.duty[sensor.index].on_duration, self._close, sensor, fr)
        start = fr.target + net.guard
        net.gate.expect(start)
        self.sim.schedule(max(self.sim.now, start), net.ap.submit, WurJob(self, sensor, fr))

    def _open(self, sensor, fr):
        if self.pending.get(sensor.index) is fr and sensor.pcr == PcrState.DOZE:
            self.waiting.add(sensor.index)
            sensor.set_wur(WurState.ON)

    def _close(self, sensor, fr):
        if self.pending.get(sensor.index) is fr and sensor.index in self.waiting:
            # still waiting for the wake-up frame: keep listening past the window
            self.net.window_overruns += 1

    def on_wur_frame(self, sensor, frame, action, ppdu):
        if action is WurAction.RESYNC and sensor.index in self.waiting:
            fr = self.pending[sensor.index]
            reopen = fr.target + self.net.guard
            if reopen > self.sim.now:
                self.waiting.discard(sensor.index)
                sensor.set_wur(WurState.OFF)
                self.sim.schedule(reopen, self._open, sensor, fr)
            return
        if action is not WurAction.WAKE or sensor.index not in self.waiting:
            return
        fr = self.pending[sensor.index]
        self.waiting.discard(sensor.index)
        sensor.set_wur(WurState.OFF)
        sensor.pcr_power_on(lambda: self.on_grant(sensor))

    def on_grant(self, sensor):
        fr = self.pending[sensor.index]
        sensor.send_data(lambda ok, p: self.on_data_result(sensor, fr, ok),
                         exchange=self.net.next_exchange("data"))

    def deliver(self, sensor, fr):
        sensor.set_wur(WurState.OFF)
        super().deliver(sensor, fr)


CHOREOGRAPHIES = {
    MethodKind.TWT_PLAIN: TwtPlain,
    MethodKind.TWT_TF: TwtWithTf,
    MethodKind.TWT_GUARD: TwtGuard,
    MethodKind.WUR_CTS: WurCts,
}


def run_once(cfg: "ScenarioConfig", method: MethodKind, sigma_s: float, seed: int,
             trace: Callable[[str], None] | None = None, keep_records: bool = False) -> RunResult:
    """Simulate cfg.frames sensor frames with one method at one sigma."""
    net = Network(cfg, method, sigma_s, seed, trace)
    chor = CHOREOGRAPHIES[method](net)
    chor.start()
    horizon = seconds(cfg.horizon_s) if cfg.horizon_s else net.horizon()
    net.sim.schedule(horizon, net.sim.stop)
    net.sim.run()
    end = net.sim.now
    # close out still-open reservations so the ledger stays consistent
    if method is MethodKind.TWT_GUARD:
        for r, left in chor.group_left.items():
            if left > 0:
                net.channel.add_reservation(chor.res_start[r], end)
    for fr in net.frames:
        if fr.delivered_at is not None:
            led = net.sensors[fr.sensor].ledger
            fr.energy_j = led.energy(fr.window_start, fr.delivered_at, net.power_fn)
    whole = sum(s.ledger.energy(0, end, net.power_fn) for s in net.sensors)
    breakdown = net.channel.breakdown(net.medium.records)
    return RunResult(method, sigma_s, seed, net.frames, breakdown, end, whole,
                     sum(s.delivered for s in net.saturated), net.window_overruns,
                     net.medium.records if keep_records else None,
                     list(net.channel.reservations), net.sensors if keep_records else None)


# -- Monte Carlo miss check ------------------------------------------------

def miss_fraction(cfg: "ScenarioConfig", method: MethodKind, sigma_s: float, rounds: int,
                  seed: int) -> tuple[int, int]:
    """Count TF / wake-up misses over many isolated rounds (no saturated STAs).

    Each round draws the sensor's drifted wake instant and the AP's backoff;
    the AP's first frame starts at target + guard + AIFS + k*slot (plus
    CTS + SIFS for the wake-up frame).  The sensor misses iff its radio was not
    on at that frame's start.  Returns (misses, rounds).
    """
    if method not in (MethodKind.TWT_TF, MethodKind.WUR_CTS):
        raise ConfigurationError("misses are defined for the TF and WUR methods only")
    params = EdcaParams(cfg.aifsn, cfg.cw_min, cfg.cw_max, cfg.slot_us, cfg.sifs_us)
    sigma = seconds(sigma_s)
    guard = int(round(cfg.guard_factor * sigma))
    drift = RngStream(seed, stream_id("sensor", 0, STREAM_DRIFT))
    backoff = RngStream(seed, stream_id("ap", 0, STREAM_BACKOFF))
    misses = 0
    chunk = 1_000_000
    done = 0
    while done < rounds:
        n = min(chunk, rounds - done)
        wake = np.rint(sample_normal_array(drift, n, 0.0, sigma)).astype(np.int64)
        k = backoff.gen.integers(0, params.cw_min + 1, n)
        start = guard + params.aifs_ns + k * params.slot_ns
        if method is MethodKind.WUR_CTS:
            start = start + us(cfg.cts_us) + us(cfg.sifs_us)
        misses += int(np.count_nonzero(wake > start))
        done += n
    return misses, rounds
