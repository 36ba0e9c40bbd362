"""WUR frame codec: MAC serialization, FCS, Manchester/OOK symbols, airtime.

Bit order convention: every MAC field is emitted least-significant bit first,
body octets included.  The FCS is a non-reflected CRC computed over the emitted
bit stream and appended most-significant bit first.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Sequence


class CodecError(ValueError):
    pass


class EncodingError(CodecError):
    """A field does not fit its width."""


class FcsError(CodecError):
    pass


class SymbolError(CodecError):
    def __init__(self, index: int, chunk: tuple[int, ...]):
        super().__init__(f"invalid codeword {''.join(map(str, chunk))} at chunk {index}")
        self.index = index
        self.chunk = chunk


class FramingError(CodecError):
    pass


class ChannelizationError(CodecError):
    pass


class WurFrameType(IntEnum):
    WAKE_UP = 0
    WUR_BEACON = 1
    WUR_DISCOVERY = 2
    VENDOR_SPECIFIC = 3


class DataRate(Enum):
    LDR = "ldr"
    HDR = "hdr"

    @property
    def symbol_us(self) -> int:
        return 4 if self is DataRate.LDR else 2

    @property
    def symbols_per_bit(self) -> int:
        return 4 if self is DataRate.LDR else 2

    @property
    def bit_us(self) -> int:
        return self.symbol_us * self.symbols_per_bit

    @property
    def kbps(self) -> float:
        return 1000.0 / self.bit_us


FC_BITS = 8
ADDRESS_BITS = 12
TD_CONTROL_BITS = 12
FCS_BITS = 16
BASE_FRAME_BITS = FC_BITS + ADDRESS_BITS + TD_CONTROL_BITS + FCS_BITS  # 48

# Frame Control layout
FC_TYPE_MASK = 0b0000_0111
FC_LENGTH_PRESENT = 0b0000_1000

PREAMBLE_US = 20  # L-STF 8 + L-LTF 8 + L-SIG 4
BPSK_MARK_US = 4
SYNC_SYMBOL_US = 2


def _lfsr_pattern() -> int:
    # 31-chip m-sequence of x^5 + x^2 + 1 from state 00001, followed by a 0 chip
    state = 0b00001
    chips = []
    for _ in range(31):
        chips.append(state & 1)
        fb = (state ^ (state >> 3)) & 1
        state = (state >> 1) | (fb << 4)
    chips.append(0)
    value = 0
    for c in chips:
        value = (value << 1) | c
    return value


DEFAULT_SYNC_PATTERN = _lfsr_pattern()

CRC16_POLY = 0x1021
CRC16_INIT = 0xFFFF


@dataclass(frozen=True)
class WurFrame:
    frame_type: WurFrameType
    address: int
    td_control: int = 0
    body: bytes = b""
    fcs: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "frame_type", WurFrameType(self.frame_type))
        object.__setattr__(self, "body", bytes(self.body))

    @property
    def length_present(self) -> bool:
        return len(self.body) > 0

    @property
    def bit_length(self) -> int:
        return BASE_FRAME_BITS + 8 * len(self.body)

    def frame_control(self) -> int:
        fc = int(self.frame_type) & FC_TYPE_MASK
        if self.body:
            fc |= FC_LENGTH_PRESENT
        return fc


def _int_to_bits_lsb(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]


def _bits_to_int_lsb(bits: Sequence[int]) -> int:
    v = 0
    for i, b in enumerate(bits):
        v |= (b & 1) << i
    return v


def bytes_to_bits_msb(data: bytes) -> list[int]:
    return [(byte >> (7 - i)) & 1 for byte in data for i in range(8)]


def compute_fcs(bits: Sequence[int]) -> int:
    """CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection) over a bit stream."""
    if len(bits) == 0:
        raise CodecError("FCS input must be nonempty")
    crc = CRC16_INIT
    for b in bits:
        top = (crc >> 15) & 1
        crc = (crc << 1) & 0xFFFF
        if top ^ (b & 1):
            crc ^= CRC16_POLY
    return crc


def serialize_mac(frame: WurFrame) -> list[int]:
    """Frame Control | address | TD control | body | FCS as a list of bits."""
    if not 0 <= frame.address < (1 << ADDRESS_BITS):
        raise EncodingError(f"address {frame.address:#x} does not fit 12 bits")
    if not 0 <= frame.td_control < (1 << TD_CONTROL_BITS):
        raise EncodingError(f"td_control {frame.td_control:#x} does not fit 12 bits")
    bits = _int_to_bits_lsb(frame.frame_control(), FC_BITS)
    bits += _int_to_bits_lsb(frame.address, ADDRESS_BITS)
    bits += _int_to_bits_lsb(frame.td_control, TD_CONTROL_BITS)
    for byte in frame.body:
        bits += _int_to_bits_lsb(byte, 8)
    fcs = compute_fcs(bits)
    bits += [(fcs >> (15 - i)) & 1 for i in range(FCS_BITS)]
    return bits


def deserialize_mac(bits: Sequence[int]) -> WurFrame:
    """Inverse of serialize_mac; raises FcsError on checksum mismatch."""
    n = len(bits)
    if n < BASE_FRAME_BITS or (n - BASE_FRAME_BITS) % 8:
        raise FramingError(f"{n} bits is not a valid WUR frame length")
    payload, fcs_bits = bits[: n - FCS_BITS], bits[n - FCS_BITS:]
    fcs = 0
    for b in fcs_bits:
        fcs = (fcs << 1) | (b & 1)
    if compute_fcs(payload) != fcs:
        raise FcsError("FCS mismatch")
    fc = _bits_to_int_lsb(payload[:FC_BITS])
    body_bits = payload[BASE_FRAME_BITS - FCS_BITS:]
    if bool(fc & FC_LENGTH_PRESENT) != bool(body_bits):
        raise FramingError("length-present flag disagrees with frame length")
    ftype = fc & FC_TYPE_MASK
    if ftype > max(WurFrameType):
        raise FramingError(f"unknown frame type {ftype}")
    address = _bits_to_int_lsb(payload[8:20])
    td = _bits_to_int_lsb(payload[20:32])
    body = bytes(_bits_to_int_lsb(body_bits[i:i + 8]) for i in range(0, len(body_bits), 8))
    return WurFrame(WurFrameType(ftype), address, td, body, fcs)


def with_fcs(frame: WurFrame) -> WurFrame:
    """Copy of frame with its fcs field filled in."""
    bits = serialize_mac(frame)
    return deserialize_mac(bits)


@dataclass(frozen=True)
class OokSymbolSeq:
    symbols: tuple[int, ...]
    symbol_us: int

    @property
    def duration_us(self) -> int:
        return len(self.symbols) * self.symbol_us

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return "".join(map(str, self.symbols))


_CODEWORDS = {
    DataRate.LDR: {1: (1, 0, 1, 0), 0: (0, 1, 0, 1)},
    DataRate.HDR: {1: (1, 0), 0: (0, 1)},
}
_DECODE = {rate: {cw: bit for bit, cw in table.items()} for rate, table in _CODEWORDS.items()}


def encode_manchester(bits: Iterable[int], rate: DataRate) -> OokSymbolSeq:
    table = _CODEWORDS[rate]
    out: list[int] = []
    for b in bits:
        out.extend(table[1 if b else 0])
    return OokSymbolSeq(tuple(out), rate.symbol_us)


def decode_manchester(symbols: OokSymbolSeq | Sequence[int], rate: DataRate) -> list[int]:
    seq = symbols.symbols if isinstance(symbols, OokSymbolSeq) else tuple(symbols)
    k = rate.symbols_per_bit
    if len(seq) % k:
        raise FramingError(f"{len(seq)} symbols is not a multiple of {k}")
    table = _DECODE[rate]
    bits = []
    for idx in range(len(seq) // k):
        chunk = tuple(seq[idx * k:(idx + 1) * k])
        try:
            bits.append(table[chunk])
        except KeyError:
            raise SymbolError(idx, chunk) from None
    return bits


def build_sync(rate: DataRate, base_sequence: int = DEFAULT_SYNC_PATTERN,
               ldr_order: str = "inv_inv") -> OokSymbolSeq:
    """WUR-Sync symbols.  HDR sends the pattern; LDR sends its complement twice.

    ldr_order="orig_inv" sends pattern then complement instead.
    """
    if not 0 <= base_sequence < (1 << 32):
        raise EncodingError("sync pattern must be 32 bits")
    s = [(base_sequence >> (31 - i)) & 1 for i in range(32)]
    if rate is DataRate.HDR:
        return OokSymbolSeq(tuple(s), SYNC_SYMBOL_US)
    inv = [1 - b for b in s]
    if ldr_order == "inv_inv":
        sym = inv + inv
    elif ldr_order == "orig_inv":
        sym = s + inv
    else:
        raise ValueError(f"unknown LDR sync order {ldr_order!r}")
    return OokSymbolSeq(tuple(sym), SYNC_SYMBOL_US)


def sync_duration_us(rate: DataRate) -> int:
    return (32 if rate is DataRate.HDR else 64) * SYNC_SYMBOL_US


@dataclass(frozen=True)
class PpduLayout:
    preamble_us: int
    bpsk_mark_us: int
    sync_us: int
    data_us: int
    padding_us: int = 0
    subchannel: int | None = None

    @property
    def total_us(self) -> int:
        return self.preamble_us + self.bpsk_mark_us + self.sync_us + self.data_us + self.padding_us


def airtime_for_bits(n_bits: int, rate: DataRate) -> PpduLayout:
    return PpduLayout(PREAMBLE_US, BPSK_MARK_US, sync_duration_us(rate), n_bits * rate.bit_us)


def ppdu_airtime(frame: WurFrame, rate: DataRate) -> PpduLayout:
    return airtime_for_bits(frame.bit_length, rate)


def build_wur_symbols(frame: WurFrame, rate: DataRate, **sync_kw) -> tuple[OokSymbolSeq, OokSymbolSeq]:
    """(sync, data) OOK symbol sequences for the WUR part of a PPDU."""
    return build_sync(rate, **sync_kw), encode_manchester(serialize_mac(frame), rate)


def fdma_align(frames: Sequence[tuple[int, WurFrame, DataRate]], primary: int = 0,
               punctured: Iterable[int] = ()) -> list[PpduLayout]:
    """Pad parallel per-subchannel WUR PPDUs to a common duration.

    One frame per 20 MHz subchannel; the primary subchannel must carry a frame
    and punctured subchannels must not.
    """
    punctured = set(punctured)
    seen: set[int] = set()
    for sub, _, _ in frames:
        if sub in seen:
            raise ChannelizationError(f"more than one WUR frame on subchannel {sub}")
        if sub in punctured:
            raise ChannelizationError(f"subchannel {sub} is punctured")
        seen.add(sub)
    if frames and primary not in seen:
        raise ChannelizationError(f"primary subchannel {primary} carries no frame")
    if primary in punctured:
        raise ChannelizationError("the primary subchannel cannot be punctured")
    layouts = [ppdu_airtime(f, r) for _, f, r in frames]
    longest = max((lay.total_us for lay in layouts), default=0)
    return [
        PpduLayout(lay.preamble_us, lay.bpsk_mark_us, lay.sync_us, lay.data_us,
                   longest - lay.total_us, sub)
        for (sub, _, _), lay in zip(frames, layouts)
    ]
