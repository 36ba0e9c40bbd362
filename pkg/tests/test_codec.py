import binascii

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wursim.codec import (BASE_FRAME_BITS, DEFAULT_SYNC_PATTERN, ChannelizationError, DataRate,
                          EncodingError, FcsError, FramingError, OokSymbolSeq, SymbolError,
                          WurFrame, WurFrameType, airtime_for_bits, build_sync, build_wur_symbols,
                          bytes_to_bits_msb, compute_fcs, decode_manchester, deserialize_mac,
                          encode_manchester, fdma_align, ppdu_airtime, serialize_mac,
                          sync_duration_us, with_fcs)

frames = st.builds(
    WurFrame,
    st.sampled_from(list(WurFrameType)),
    st.integers(0, 0xFFF),
    st.integers(0, 0xFFF),
    st.binary(max_size=16),
)


def crc_oracle(bits):
    """CRC-16/CCITT-FALSE by GF(2) long division on a Python int.

    Presetting the register to 0xFFFF equals complementing the first 16
    message bits; the remainder of M(x) * x^16 mod G(x) is the CRC.
    """
    m = 0
    for b in bits:
        m = (m << 1) | b
    n = len(bits)
    m ^= 0xFFFF << (n - 16)
    m <<= 16
    g = 0x11021
    for shift in range(n + 15, 15, -1):
        if m >> shift & 1:
            m ^= g << (shift - 16)
    return m


def test_crc_check_value():
    # catalogue check value of CRC-16/CCITT-FALSE
    assert compute_fcs(bytes_to_bits_msb(b"123456789")) == 0x29B1


@given(st.binary(min_size=2, max_size=40))
def test_crc_matches_binascii_on_octets(data):
    assert compute_fcs(bytes_to_bits_msb(data)) == binascii.crc_hqx(data, 0xFFFF)


@given(st.lists(st.integers(0, 1), min_size=16, max_size=200))
def test_crc_matches_long_division(bits):
    assert compute_fcs(bits) == crc_oracle(bits)


def test_bodiless_frame_is_48_bits():
    f = WurFrame(WurFrameType.WAKE_UP, 0x123, 0x456)
    assert f.bit_length == BASE_FRAME_BITS == 48
    assert len(serialize_mac(f)) == 48


def test_field_layout_lsb_first():
    bits = serialize_mac(WurFrame(WurFrameType.WUR_BEACON, 0x001, 0x800))
    assert bits[0:8] == [1, 0, 0, 0, 0, 0, 0, 0]          # type 1, no length flag
    assert bits[8:20] == [1] + [0] * 11                    # address 0x001
    assert bits[20:32] == [0] * 11 + [1]                   # TD control 0x800
    fcs = int("".join(map(str, bits[32:])), 2)
    assert fcs == crc_oracle(bits[:32])


def test_length_present_flag_follows_body():
    bits = serialize_mac(WurFrame(WurFrameType.VENDOR_SPECIFIC, 1, 0, b"\x01"))
    assert bits[3] == 1
    assert len(bits) == 56


@given(frames)
def test_mac_round_trip(frame):
    back = deserialize_mac(serialize_mac(frame))
    assert (back.frame_type, back.address, back.td_control, back.body) == (
        frame.frame_type, frame.address, frame.td_control, frame.body)
    assert back.fcs == with_fcs(frame).fcs


@pytest.mark.parametrize("pos", range(48))
def test_every_single_bit_error_is_detected(pos):
    bits = serialize_mac(WurFrame(WurFrameType.WAKE_UP, 0x5A5, 0x0F0))
    bits[pos] ^= 1
    with pytest.raises((FcsError, FramingError)):
        deserialize_mac(bits)


@given(frames, st.data())
def test_single_bit_errors_detected_any_frame(frame, data):
    bits = serialize_mac(frame)
    pos = data.draw(st.integers(0, len(bits) - 1))
    bits[pos] ^= 1
    with pytest.raises((FcsError, FramingError)):
        deserialize_mac(bits)


def test_oversized_fields_rejected():
    with pytest.raises(EncodingError):
        serialize_mac(WurFrame(WurFrameType.WAKE_UP, 0x1000))
    with pytest.raises(EncodingError):
        serialize_mac(WurFrame(WurFrameType.WAKE_UP, 1, 0x1000))


def test_truncated_frame_is_a_framing_error():
    with pytest.raises(FramingError):
        deserialize_mac(serialize_mac(WurFrame(WurFrameType.WAKE_UP, 1))[:47])


def test_manchester_codewords():
    assert encode_manchester([1, 0], DataRate.LDR).symbols == (1, 0, 1, 0, 0, 1, 0, 1)
    assert encode_manchester([1, 0], DataRate.HDR).symbols == (1, 0, 0, 1)
    assert encode_manchester([1], DataRate.LDR).duration_us == 16
    assert encode_manchester([1], DataRate.HDR).duration_us == 4


def _manchester_oracle(bits, rate):
    word = {"ldr": ("0101", "1010"), "hdr": ("01", "10")}[rate.value]
    return tuple(int(c) for c in "".join(word[b] for b in bits))


@pytest.mark.parametrize("rate", list(DataRate))
@given(bits=st.lists(st.integers(0, 1), max_size=300))
def test_manchester_round_trip(rate, bits):
    sym = encode_manchester(bits, rate)
    assert sym.symbols == _manchester_oracle(bits, rate)
    assert decode_manchester(sym, rate) == bits


def test_invalid_symbol_pair_reports_index():
    with pytest.raises(SymbolError) as e:
        decode_manchester([1, 0, 1, 1], DataRate.HDR)
    assert e.value.index == 1


def test_symbol_count_must_align():
    with pytest.raises(FramingError):
        decode_manchester([1, 0, 1], DataRate.HDR)


def test_default_sync_is_an_m_sequence_plus_one_chip():
    chips = [(DEFAULT_SYNC_PATTERN >> (31 - i)) & 1 for i in range(32)]
    assert chips[-1] == 0
    s = 1 - 2 * np.array(chips[:31])
    corr = [int(np.dot(s, np.roll(s, k))) for k in range(31)]
    assert corr[0] == 31 and set(corr[1:]) == {-1}


def test_sync_structure():
    s = build_sync(DataRate.HDR)
    assert s.duration_us == 64 == sync_duration_us(DataRate.HDR)
    ldr = build_sync(DataRate.LDR)
    assert ldr.duration_us == 128 == sync_duration_us(DataRate.LDR)
    inv = tuple(1 - b for b in s.symbols)
    assert ldr.symbols == inv + inv
    assert build_sync(DataRate.LDR, ldr_order="orig_inv").symbols == s.symbols + inv
    with pytest.raises(EncodingError):
        build_sync(DataRate.HDR, 1 << 32)


def test_airtime_golden_values():
    bare = WurFrame(WurFrameType.WAKE_UP, 7)
    assert ppdu_airtime(bare, DataRate.LDR).total_us == 920
    assert ppdu_airtime(bare, DataRate.HDR).total_us == 280
    # 20 + 4 + 128 + 96 * 16
    assert airtime_for_bits(96, DataRate.LDR).total_us == 1688


@given(frames, st.sampled_from(list(DataRate)))
def test_airtime_equals_symbol_stream_duration(frame, rate):
    sync, data = build_wur_symbols(frame, rate)
    lay = ppdu_airtime(frame, rate)
    assert lay.total_us == 20 + 4 + sync.duration_us + data.duration_us


subchannel_sets = st.lists(
    st.tuples(st.integers(0, 7), frames, st.sampled_from(list(DataRate))),
    min_size=1, max_size=8, unique_by=lambda t: t[0])


@given(subchannel_sets)
def test_fdma_align_pads_to_common_duration(items):
    primary = items[0][0]
    out = fdma_align(items, primary=primary)
    durations = {lay.total_us for lay in out}
    assert len(durations) == 1
    longest = max(ppdu_airtime(f, r).total_us for _, f, r in items)
    assert durations == {longest}
    assert all(lay.padding_us >= 0 for lay in out)


def test_fdma_rejects_bad_channelization():
    f = WurFrame(WurFrameType.WAKE_UP, 1)
    with pytest.raises(ChannelizationError):
        fdma_align([(1, f, DataRate.LDR)], primary=0)
    with pytest.raises(ChannelizationError):
        fdma_align([(0, f, DataRate.LDR), (0, f, DataRate.HDR)])
    with pytest.raises(ChannelizationError):
        fdma_align([(0, f, DataRate.LDR), (2, f, DataRate.HDR)], punctured=[2])


def test_ook_symbol_seq_str():
    assert str(OokSymbolSeq((1, 0, 1), 2)) == "101"
