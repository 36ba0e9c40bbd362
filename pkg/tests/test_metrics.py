import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wursim.channel import Ppdu, PpduKind, TAG_SATURATED, TAG_TRANSACTION
from wursim.metrics import (ChannelLedger, EnergyLedger, MetricsError, _union, aggregate,
                            channel_time_per_frame, energy_per_frame, slope_ci)

POWER = {"a": 1.0, "b": 10.0, "c": 0.25}


def pw(p, w):
    return POWER[p]


segments = st.lists(st.tuples(st.integers(1, 10_000), st.sampled_from("abc")), min_size=1, max_size=30)


def _ledger(segs):
    led = EnergyLedger(0, "a", None)
    t = 0
    for dt, state in segs:
        t += dt
        led.record(t, state, None)
    return led, t


@given(segments, st.data())
def test_energy_is_additive_under_splitting(segs, data):
    led, t_end = _ledger(segs)
    cut = data.draw(st.integers(0, t_end))
    whole = led.energy(0, t_end, pw)
    parts = led.energy(0, cut, pw) + led.energy(cut, t_end, pw)
    assert parts == pytest.approx(whole, rel=1e-12)
    led.split(cut)
    assert led.energy(0, t_end, pw) == pytest.approx(whole, rel=1e-12)


@given(segments)
def test_energy_matches_explicit_sum(segs):
    led, t_end = _ledger(segs)
    # state before the first record is "a"; segment k ends at the k-th record
    expected, t, state = 0.0, 0, "a"
    for dt, nxt in segs:
        expected += POWER[state] * dt
        t += dt
        state = nxt
    assert led.energy(0, t_end, pw) == pytest.approx(expected * 1e-12, rel=1e-12)
    assert led.energy(0, t_end, pw) >= 0


def test_energy_per_frame_window():
    led = EnergyLedger(0, "a", None)
    led.record(100, "b", None)
    assert energy_per_frame(led, (50, 150), pw) == pytest.approx((50 * 1 + 50 * 10) * 1e-12)


def test_ledger_rejects_bad_windows():
    led = EnergyLedger(10, "a", None)
    with pytest.raises(MetricsError):
        led.energy(0, 5, pw)
    with pytest.raises(MetricsError):
        led.energy(20, 15, pw)
    with pytest.raises(MetricsError):
        led.record(5, "b", None)


def _p(start, dur, tag=TAG_TRANSACTION, corrupted=False, exchange=None):
    p = Ppdu(1, PpduKind.LEGACY_DATA, dur, tag=tag, exchange=exchange)
    p.start, p.end, p.corrupted = start, start + dur, corrupted
    return p


def test_exchange_span_includes_sifs_gap():
    recs = [_p(0, 1480, exchange="x"), _p(1496, 44, exchange="x")]
    b = ChannelLedger().breakdown(recs)
    assert b.total == b.transactions == 1540


def test_collision_counts_union_when_transaction_involved():
    recs = [_p(0, 1480, corrupted=True), _p(1000, 1480, TAG_SATURATED, corrupted=True),
            _p(5000, 100, TAG_SATURATED, corrupted=True), _p(5050, 100, TAG_SATURATED, corrupted=True)]
    b = ChannelLedger().breakdown(recs)
    assert b.collisions == 2480 and b.total == 2480


def test_saturated_only_traffic_is_excluded():
    assert ChannelLedger().breakdown([_p(0, 1000, TAG_SATURATED)]).total == 0


def test_reservation_counted_once():
    led = ChannelLedger()
    led.add_reservation(0, 10_000)
    led.add_reservation(5_000, 12_000)
    b = led.breakdown([_p(100, 1480, exchange=1)])
    assert b.reserved == 12_000 and b.transactions == 0 and b.total == 12_000


ppdus = st.lists(st.tuples(st.integers(0, 5000), st.integers(1, 2000), st.sampled_from(
    [TAG_TRANSACTION, TAG_SATURATED]), st.booleans(), st.sampled_from([None, 1, 2, 3])), max_size=25)
reservations = st.lists(st.tuples(st.integers(0, 6000), st.integers(0, 3000)), max_size=3)


@given(ppdus, reservations)
def test_components_are_disjoint_and_sum_to_total(items, res):
    recs = [_p(s, d, tag, c, ex) for s, d, tag, c, ex in items]
    led = ChannelLedger()
    for s, d in res:
        led.add_reservation(s, s + d)
    b = led.breakdown(recs)
    assert b.total == b.transactions + b.collisions + b.reserved
    assert min(b.transactions, b.collisions, b.reserved) >= 0
    # disjointness: total equals the measure of the union of all components
    parts = (list(led.reservations) + led.collision_intervals(recs) + led.transaction_spans(recs))
    assert b.total == sum(e - s for s, e in _union(parts))


def test_channel_time_per_frame():
    assert channel_time_per_frame(1_540_000, 1) == pytest.approx(1540e-6)
    with pytest.raises(MetricsError):
        channel_time_per_frame(100, 0)


def test_identical_replications_give_zero_ci():
    st_ = aggregate([3.0] * 10)
    assert st_.mean == 3.0 and st_.ci95 == 0.0


def test_t_interval_nine_dof():
    x = np.arange(10.0)
    s = aggregate(x)
    # tabulated t_{0.975, 9}
    assert s.ci95 == pytest.approx(2.262157163 * x.std(ddof=1) / math.sqrt(10), rel=1e-9)


def test_single_replication_warns():
    with pytest.warns(UserWarning):
        s = aggregate([1.0])
    assert math.isnan(s.ci95)


def test_ci_shrinks_with_replications():
    rng = np.random.default_rng(0)
    ratio = np.mean([aggregate(rng.normal(size=40)).ci95 / aggregate(rng.normal(size=20)).ci95
                     for _ in range(400)])
    # t quantiles: 2.0227/2.0930 * sqrt(20/40) = 0.683
    assert ratio == pytest.approx(0.683, abs=0.03)


def test_slope_ci_against_normal_equations():
    rng = np.random.default_rng(4)
    x = np.repeat([1.0, 2, 3, 4, 5], 6)
    y = 2.0 * x + rng.normal(size=x.size)
    b, lo, hi = slope_ci(x, y)
    X = np.column_stack([np.ones_like(x), x])
    beta, rss, *_ = np.linalg.lstsq(X, y, rcond=None)
    se = math.sqrt(rss[0] / (x.size - 2) / ((x - x.mean()) ** 2).sum())
    q = 2.048407142  # tabulated t_{0.975, 28}
    assert b == pytest.approx(beta[1])
    assert (lo, hi) == pytest.approx((beta[1] - q * se, beta[1] + q * se), rel=1e-8)
