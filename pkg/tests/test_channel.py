from hypothesis import given, strategies as st

from wursim.channel import Cca, Medium, ModelError, Ppdu, PpduKind, busy_fraction
from wursim.kernel import Simulator

import pytest


class Rx:
    def __init__(self):
        self.got = []

    def receive(self, p):
        self.got.append(p.label)
        return True


def _tx(medium, src, dur, label="", **kw):
    p = Ppdu(src, PpduKind.LEGACY_DATA, dur, label=label, **kw)
    medium.begin_tx(p)
    return p


def test_overlap_corrupts_both():
    sim = Simulator()
    m = Medium(sim)
    a = _tx(m, 1, 100)
    sim.schedule(50, lambda: _tx(m, 2, 100, "b"))
    sim.run()
    b = m.records[1]
    assert a.corrupted and b.corrupted


def test_back_to_back_is_not_overlap():
    sim = Simulator()
    m = Medium(sim)
    a = _tx(m, 1, 100)
    sim.schedule(100, lambda: _tx(m, 2, 100))
    sim.run()
    assert not any(p.corrupted for p in m.records)
    assert busy_fraction(m.records, 0, 200) == 1.0
    assert a.end == 100


def test_double_transmit_is_a_model_error():
    sim = Simulator()
    m = Medium(sim)
    _tx(m, 1, 100)
    with pytest.raises(ModelError):
        _tx(m, 1, 10)


def test_corrupted_frames_are_not_delivered():
    sim = Simulator()
    m = Medium(sim)
    rx = Rx()
    m.receivers[9] = rx
    _tx(m, 1, 100, "x")
    _tx(m, 2, 100, "y")
    sim.run()
    assert rx.got == []


def test_nav_set_on_third_parties_only():
    sim = Simulator()
    m = Medium(sim)
    m.receivers[5] = Rx()
    m.receivers[6] = Rx()
    _tx(m, 1, 100, nav=500, dest=5)
    sim.run_until(100)
    assert m.nav.get(6) == 600
    assert 5 not in m.nav
    sim.run_until(300)
    assert m.cca(6) is Cca.BUSY
    assert m.cca(5) is Cca.IDLE
    sim.run_until(600)
    assert m.cca(6) is Cca.IDLE


def test_wur_ppdu_sets_no_nav():
    sim = Simulator()
    m = Medium(sim)
    m.receivers[5] = Rx()
    m.begin_tx(Ppdu(1, PpduKind.WUR, 100, nav=500))
    sim.run()
    assert 5 not in m.nav


def test_blocked_station_sees_busy():
    sim = Simulator()
    m = Medium(sim)
    m.block([3])
    assert m.busy(3) and not m.busy(4)
    m.unblock([3])
    assert not m.busy(3)


class Listener:
    def __init__(self):
        self.flips = []

    def on_medium(self, busy):
        self.flips.append(busy)


def test_listener_sees_each_state_flip_once():
    sim = Simulator()
    m = Medium(sim)
    m.receivers[4] = Rx()
    lis = Listener()
    assert m.add_listener(4, lis) is False
    _tx(m, 1, 100, nav=50)
    sim.run()
    assert lis.flips == [True, False]
    assert sim.now == 150


@given(st.lists(st.tuples(st.integers(0, 1000), st.integers(1, 300)), max_size=20))
def test_busy_fraction_matches_sampling(spans):
    recs = []
    for s, d in spans:
        p = Ppdu(0, PpduKind.LEGACY_DATA, d)
        p.start, p.end = s, s + d
        recs.append(p)
    covered = sum(1 for t in range(0, 1400) if any(p.start <= t < p.end for p in recs))
    assert busy_fraction(recs, 0, 1400) == pytest.approx(covered / 1400)
