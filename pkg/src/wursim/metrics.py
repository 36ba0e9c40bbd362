"""Per-frame energy and channel-time accounting, plus replication statistics."""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy import stats

from .channel import Ppdu, TAG_TRANSACTION

# mW * ns = 1e-12 J
PJ_PER_MW_NS = 1e-12


class MetricsError(ValueError):
    pass


class EnergyLedger:
    """Piecewise-constant power-state timeline of one station.

    Breakpoints are stored as parallel lists; state k holds on
    [times[k], times[k+1]).  States are opaque hashables (e.g. PCR/WUR enums).
    """

    def __init__(self, t0: int = 0, pcr: Hashable = None, wur: Hashable = None):
        self.times = [t0]
        self.pcr = [pcr]
        self.wur = [wur]

    def record(self, t: int, pcr: Hashable, wur: Hashable) -> None:
        if t < self.times[-1]:
            raise MetricsError("ledger times must be non-decreasing")
        if t == self.times[-1]:
            self.pcr[-1] = pcr
            self.wur[-1] = wur
            if len(self.times) > 1 and self.pcr[-2] == pcr and self.wur[-2] == wur:
                self.times.pop(); self.pcr.pop(); self.wur.pop()
            return
        if pcr == self.pcr[-1] and wur == self.wur[-1]:
            return
        self.times.append(t)
        self.pcr.append(pcr)
        self.wur.append(wur)

    def split(self, t: int) -> None:
        """Insert a breakpoint at t without changing any state."""
        k = bisect.bisect_right(self.times, t) - 1
        if k < 0 or self.times[k] == t:
            return
        self.times.insert(k + 1, t)
        self.pcr.insert(k + 1, self.pcr[k])
        self.wur.insert(k + 1, self.wur[k])

    def state_at(self, t: int) -> tuple[Hashable, Hashable]:
        k = bisect.bisect_right(self.times, t) - 1
        if k < 0:
            raise MetricsError(f"{t} precedes the ledger start")
        return self.pcr[k], self.wur[k]

    def intervals(self, t_end: int) -> list[tuple[int, int, Hashable, Hashable]]:
        out = []
        for k, start in enumerate(self.times):
            end = self.times[k + 1] if k + 1 < len(self.times) else t_end
            end = min(end, t_end)
            if end > start:
                out.append((start, end, self.pcr[k], self.wur[k]))
        return out

    def energy(self, a: int, b: int, power_mw: Callable[[Hashable, Hashable], float]) -> float:
        """Joules consumed over [a, b)."""
        if b < a:
            raise MetricsError("window end precedes start")
        if a < self.times[0]:
            raise MetricsError("window starts before the ledger")
        times = self.times
        k = bisect.bisect_right(times, a) - 1
        total = 0.0
        t = a
        n = len(times)
        while t < b:
            nxt = times[k + 1] if k + 1 < n else b
            seg_end = min(nxt, b)
            total += power_mw(self.pcr[k], self.wur[k]) * (seg_end - t)
            t = seg_end
            k += 1
        return total * PJ_PER_MW_NS


def energy_per_frame(ledger: EnergyLedger, window: tuple[int, int],
                     power_mw: Callable[[Hashable, Hashable], float]) -> float:
    """Energy of one delivered frame: integral of power over its measurement window."""
    return ledger.energy(window[0], window[1], power_mw)


# -- channel time --------------------------------------------------------

def _union(intervals: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[list[int]] = []
    for s, e in sorted(i for i in intervals if i[1] > i[0]):
        if out and s <= out[-1][1]:
            if e > out[-1][1]:
                out[-1][1] = e
        else:
            out.append([s, e])
    return [(s, e) for s, e in out]


def _measure(intervals: Sequence[tuple[int, int]]) -> int:
    return sum(e - s for s, e in intervals)


def _subtract(a: Sequence[tuple[int, int]], b: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """a minus b, both unions of disjoint sorted intervals."""
    out = []
    j = 0
    for s, e in a:
        cur = s
        while j < len(b) and b[j][1] <= cur:
            j += 1
        k = j
        while k < len(b) and b[k][0] < e:
            if b[k][0] > cur:
                out.append((cur, b[k][0]))
            cur = max(cur, b[k][1])
            k += 1
        if cur < e:
            out.append((cur, e))
    return out


@dataclass(frozen=True)
class ChannelBreakdown:
    total: int
    transactions: int
    collisions: int
    reserved: int


class ChannelLedger:
    """Channel time attributable to sensors and the AP.

    Built after a run from the medium's PPDU records plus explicit reservations.
    Collisions count the union interval of PPDUs that overlap; a collision
    counts only if it involves a sensor/AP transaction PPDU.  Uncorrupted
    transaction PPDUs sharing an exchange key count as one span from the first
    start to the last end (so SIFS gaps inside an exchange are included).
    Overlapping components are attributed once, reserved > collision > transaction.
    """

    def __init__(self) -> None:
        self.reservations: list[tuple[int, int]] = []

    def add_reservation(self, start: int, end: int) -> None:
        if end < start:
            raise MetricsError("reservation ends before it starts")
        self.reservations.append((start, end))

    def collision_intervals(self, records: Sequence[Ppdu]) -> list[tuple[int, int]]:
        bad = sorted((p for p in records if p.corrupted), key=lambda p: (p.start, p.end))
        out = []
        cur_s = cur_e = None
        involved = False
        for p in bad:
            if cur_e is not None and p.start < cur_e:
                cur_e = max(cur_e, p.end)
                involved = involved or p.tag == TAG_TRANSACTION
                continue
            if cur_e is not None and involved:
                out.append((cur_s, cur_e))
            cur_s, cur_e, involved = p.start, p.end, p.tag == TAG_TRANSACTION
        if cur_e is not None and involved:
            out.append((cur_s, cur_e))
        return out

    def transaction_spans(self, records: Sequence[Ppdu]) -> list[tuple[int, int]]:
        spans: dict = {}
        loose = []
        for p in records:
            if p.corrupted or p.tag != TAG_TRANSACTION:
                continue
            if p.exchange is None:
                loose.append((p.start, p.end))
                continue
            s, e = spans.get(p.exchange, (p.start, p.end))
            spans[p.exchange] = (min(s, p.start), max(e, p.end))
        return loose + list(spans.values())

    def breakdown(self, records: Sequence[Ppdu]) -> ChannelBreakdown:
        r = _union(self.reservations)
        c = _subtract(_union(self.collision_intervals(records)), r)
        rc = _union(r + c)
        t = _subtract(_union(self.transaction_spans(records)), rc)
        res, col, txn = _measure(r), _measure(c), _measure(t)
        return ChannelBreakdown(res + col + txn, txn, col, res)


def channel_time_per_frame(total_ns: int, delivered: int) -> float:
    """Seconds of channel time per delivered frame."""
    if delivered <= 0:
        raise MetricsError("no frames delivered; channel time per frame is undefined")
    return total_ns / delivered * 1e-9


# -- replication statistics ---------------------------------------------

@dataclass(frozen=True)
class SweepStats:
    mean: float
    std: float
    ci95: float
    n: int


def aggregate(values: Sequence[float]) -> SweepStats:
    """Mean and Student-t 95% half-width over replication-level values."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n == 0:
        raise MetricsError("no replications to aggregate")
    mean = float(x.mean())
    if n < 2:
        warnings.warn("single replication: confidence interval omitted", stacklevel=2)
        return SweepStats(mean, math.nan, math.nan, n)
    std = float(x.std(ddof=1))
    half = float(stats.t.ppf(0.975, n - 1) * std / math.sqrt(n))
    return SweepStats(mean, std, half, n)


def slope_ci(x: Sequence[float], y: Sequence[float], level: float = 0.95) -> tuple[float, float, float]:
    """OLS slope of y on x with its t-based confidence interval (slope, lo, hi)."""
    res = stats.linregress(np.asarray(x, float), np.asarray(y, float))
    q = stats.t.ppf(0.5 + level / 2, len(x) - 2)
    return float(res.slope), float(res.slope - q * res.stderr), float(res.slope + q * res.stderr)
