"""Bit-exact frame codec.

On-air layout::

    preamble tag (8) | EH(72,64) x 2 over [PHY hdr | MAC hdr | HCS | stuff] | payload

PHY header: MCS (4 bits SC / 2 bits OOK) | LENGTH (22) | RESERVED (6).
MAC header: type (3) | ack policy (1) | pairnet id (16) | src (8) | dest (8) |
seq (12) | reserved (16).  HCS is CRC-16/CCITT-FALSE over PHY + MAC header
bits.  Bits are numpy ``uint8`` arrays of 0/1, most significant bit first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from thz3d.channel_plan import ChannelDescriptor
from thz3d.phy import InvalidMcs, Mcs, PhyMode, symbol_rate

MIN_FRAME_BYTES = 2048
MAX_FRAME_BYTES = 2_099_200
LENGTH_BITS = 22
MAC_HEADER_BITS = 64
HCS_BITS = 16
EH_DATA_BITS = 64
EH_CODE_BITS = 72
TAG_BITS = 8


class CodecError(ValueError):
    pass


class LengthMismatch(CodecError):
    pass


class LengthOutOfRange(CodecError):
    pass


class HcsFailure(CodecError):
    pass


class EhFailure(CodecError):
    pass


class Truncated(CodecError):
    pass


class BadPreamble(CodecError):
    pass


class InvalidField(CodecError):
    pass


class DetectedUncorrectable(EhFailure):
    pass


class Preamble(enum.Enum):
    LONG = (0xF0, 2048)
    SHORT = (0x0F, 1024)

    def __init__(self, tag: int, symbols: int):
        self.tag = tag
        self.symbols = symbols


class FrameType(enum.IntEnum):
    BEACON = 0
    ASSOC_REQ = 1
    ASSOC_RSP = 2
    DATA = 3
    ACK = 4
    PROBE_REQ = 5
    DISASSOC_REQ = 6

    @property
    def in_setup_period(self) -> bool:
        return self in (FrameType.BEACON, FrameType.ASSOC_REQ, FrameType.ASSOC_RSP)


def phy_header_bits(mode: PhyMode) -> int:
    return (4 if mode is PhyMode.THZ_SC else 2) + LENGTH_BITS + 6


# ---------------------------------------------------------------------------
# bit helpers


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    """Pack bits MSB-first, zero-padding the tail to a byte boundary."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


# ---------------------------------------------------------------------------
# CRC-16/CCITT-FALSE


def crc16(bits) -> int:
    """CRC-16/CCITT-FALSE over a bit sequence (poly 0x1021, init 0xFFFF, MSB first)."""
    crc = 0xFFFF
    for b in bits:
        top = ((crc >> 15) & 1) ^ int(b)
        crc = (crc << 1) & 0xFFFF
        if top:
            crc ^= 0x1021
    return crc


def crc16_bytes(data: bytes) -> int:
    return crc16(bytes_to_bits(data))


# ---------------------------------------------------------------------------
# extended Hamming (72,64): Hamming(71,64) on positions 1..71, overall parity
# at position 0.  Check bits live at the power-of-two positions.

_PARITY_POSITIONS = (1, 2, 4, 8, 16, 32, 64)
_DATA_POSITIONS = np.array([p for p in range(1, EH_CODE_BITS) if p not in _PARITY_POSITIONS])
_POSITIONS = np.arange(EH_CODE_BITS)


def _syndrome(word: np.ndarray) -> int:
    ones = _POSITIONS[word.astype(bool)]
    return int(np.bitwise_xor.reduce(ones)) if len(ones) else 0


def eh_encode(block) -> np.ndarray:
    block = np.asarray(block, dtype=np.uint8)
    if block.shape != (EH_DATA_BITS,):
        raise ValueError(f"EH block must be {EH_DATA_BITS} bits, got {block.shape}")
    word = np.zeros(EH_CODE_BITS, dtype=np.uint8)
    word[_DATA_POSITIONS] = block
    s = _syndrome(word)
    for p in _PARITY_POSITIONS:
        if s & p:
            word[p] = 1
    word[0] = word.sum() & 1
    return word


def eh_decode(codeword) -> tuple[np.ndarray, int]:
    """Return (data bits, corrected count); raise DetectedUncorrectable on a double error."""
    word = np.array(codeword, dtype=np.uint8)
    if word.shape != (EH_CODE_BITS,):
        raise ValueError(f"EH codeword must be {EH_CODE_BITS} bits, got {word.shape}")
    s = _syndrome(word)
    odd = bool(word.sum() & 1)
    corrected = 0
    if odd:
        if s >= EH_CODE_BITS:
            raise DetectedUncorrectable(f"syndrome {s} points outside the codeword")
        word[s] ^= 1  # s == 0: the overall parity bit itself
        corrected = 1
    elif s:
        raise DetectedUncorrectable("double-bit error")
    return word[_DATA_POSITIONS].copy(), corrected


# ---------------------------------------------------------------------------
# headers and frames


@dataclass(frozen=True)
class PhyHeader:
    mode: PhyMode
    mcs_index: int
    frame_length_bytes: int
    reserved: int = 0

    def __post_init__(self):
        width = 4 if self.mode is PhyMode.THZ_SC else 2
        if not 0 <= self.mcs_index < 2**width:
            raise InvalidField(f"MCS index {self.mcs_index} does not fit in {width} bits")
        if not MIN_FRAME_BYTES <= self.frame_length_bytes <= MAX_FRAME_BYTES:
            raise LengthOutOfRange(
                f"frame length {self.frame_length_bytes} outside [{MIN_FRAME_BYTES}, {MAX_FRAME_BYTES}]"
            )
        if self.reserved:
            raise InvalidField("PHY reserved bits must be zero")

    @property
    def mcs(self) -> Mcs:
        return Mcs.from_index(self.mode, self.mcs_index)

    def to_bits(self) -> np.ndarray:
        width = 4 if self.mode is PhyMode.THZ_SC else 2
        return np.concatenate(
            [int_to_bits(self.mcs_index, width), int_to_bits(self.frame_length_bytes, LENGTH_BITS), np.zeros(6, np.uint8)]
        )


@dataclass(frozen=True)
class MacHeader:
    frame_type: FrameType
    ack_policy: int = 0
    pairnet_id: int = 0
    src_id: int = 0
    dest_id: int = 0
    seq_num: int = 0
    reserved: int = 0

    def __post_init__(self):
        object.__setattr__(self, "frame_type", FrameType(self.frame_type))
        for name, width in (("ack_policy", 1), ("pairnet_id", 16), ("src_id", 8), ("dest_id", 8), ("seq_num", 12)):
            value = getattr(self, name)
            if not 0 <= value < 2**width:
                raise InvalidField(f"{name}={value} does not fit in {width} bits")
        if self.reserved:
            raise InvalidField("MAC reserved bits must be zero")

    def to_bits(self) -> np.ndarray:
        value = self.frame_type
        for v, width in ((self.ack_policy, 1), (self.pairnet_id, 16), (self.src_id, 8), (self.dest_id, 8), (self.seq_num, 12)):
            value = (value << width) | v
        value <<= 16
        return int_to_bits(value, MAC_HEADER_BITS)

    @classmethod
    def from_bits(cls, bits) -> "MacHeader":
        value = bits_to_int(bits)
        fields = []
        for width in (16, 12, 8, 8, 16, 1):
            fields.append(value & ((1 << width) - 1))
            value >>= width
        reserved, seq, dest, src, pairnet, ack = fields
        if value == 7:
            raise InvalidField("frame type code 7 is undefined")
        return cls(FrameType(value), ack, pairnet, src, dest, seq, reserved)


@dataclass(frozen=True)
class Frame:
    preamble: Preamble
    phy_header: PhyHeader
    mac_header: MacHeader
    payload: bytes = field(repr=False)

    def __post_init__(self):
        if len(self.payload) != self.phy_header.frame_length_bytes:
            raise LengthMismatch(
                f"payload is {len(self.payload)} bytes but the PHY header says {self.phy_header.frame_length_bytes}"
            )
        expected = Preamble.LONG if self.mac_header.frame_type.in_setup_period else Preamble.SHORT
        if self.preamble is not expected:
            raise InvalidField(f"{self.mac_header.frame_type.name} frames use the {expected.name} preamble")

    @property
    def mode(self) -> PhyMode:
        return self.phy_header.mode

    @property
    def mcs(self) -> Mcs:
        return self.phy_header.mcs

    @property
    def hcs(self) -> int:
        return crc16(np.concatenate([self.phy_header.to_bits(), self.mac_header.to_bits()]))

    @classmethod
    def build(cls, mcs: Mcs, mac_header: MacHeader, payload: bytes) -> "Frame":
        """Frame with the preamble its type calls for and a length matching ``payload``."""
        preamble = Preamble.LONG if mac_header.frame_type.in_setup_period else Preamble.SHORT
        return cls(preamble, PhyHeader(mcs.mode, mcs.index, len(payload)), mac_header, payload)


def header_block_bits(mode: PhyMode) -> int:
    """Header bits before stuffing: PHY + MAC + HCS."""
    return phy_header_bits(mode) + MAC_HEADER_BITS + HCS_BITS


def header_codewords(mode: PhyMode) -> int:
    return -(-header_block_bits(mode) // EH_DATA_BITS)


def header_air_bits(mode: PhyMode) -> int:
    return header_codewords(mode) * EH_CODE_BITS


def frame_bit_length(frame: Frame) -> int:
    """Number of bits encode_frame emits for ``frame``."""
    return TAG_BITS + header_air_bits(frame.mode) + 8 * len(frame.payload)


def encode_header(frame: Frame) -> np.ndarray:
    phy = frame.phy_header.to_bits()
    mac = frame.mac_header.to_bits()
    hcs = int_to_bits(crc16(np.concatenate([phy, mac])), HCS_BITS)
    block = np.concatenate([phy, mac, hcs])
    stuffed = np.zeros(header_codewords(frame.mode) * EH_DATA_BITS, dtype=np.uint8)
    stuffed[: len(block)] = block
    return np.concatenate([eh_encode(chunk) for chunk in stuffed.reshape(-1, EH_DATA_BITS)])


def encode_frame(frame: Frame) -> np.ndarray:
    if len(frame.payload) != frame.phy_header.frame_length_bytes:
        raise LengthMismatch("payload length disagrees with the PHY header")
    return np.concatenate([int_to_bits(frame.preamble.tag, TAG_BITS), encode_header(frame), bytes_to_bits(frame.payload)])


def decode_frame(bits, mode: PhyMode) -> Frame:
    bits = np.asarray(bits, dtype=np.uint8)
    n_header = header_air_bits(mode)
    if len(bits) < TAG_BITS + n_header:
        raise Truncated(f"{len(bits)} bits is shorter than preamble tag + header")
    tag = bits_to_int(bits[:TAG_BITS])
    preamble = next((p for p in Preamble if p.tag == tag), None)
    if preamble is None:
        raise BadPreamble(f"unknown preamble tag 0x{tag:02X}")

    coded = bits[TAG_BITS : TAG_BITS + n_header].reshape(-1, EH_CODE_BITS)
    try:
        block = np.concatenate([eh_decode(word)[0] for word in coded])
    except DetectedUncorrectable as exc:
        raise EhFailure(str(exc)) from None

    n_phy = phy_header_bits(mode)
    phy_bits = block[:n_phy]
    mac_bits = block[n_phy : n_phy + MAC_HEADER_BITS]
    hcs_end = n_phy + MAC_HEADER_BITS + HCS_BITS
    if crc16(block[: n_phy + MAC_HEADER_BITS]) != bits_to_int(block[n_phy + MAC_HEADER_BITS : hcs_end]):
        raise HcsFailure("header check sequence mismatch")
    if block[hcs_end:].any():
        raise InvalidField("header stuff bits must be zero")

    width = n_phy - LENGTH_BITS - 6
    mcs_index = bits_to_int(phy_bits[:width])
    length = bits_to_int(phy_bits[width : width + LENGTH_BITS])
    reserved = bits_to_int(phy_bits[width + LENGTH_BITS :])
    try:
        Mcs.from_index(mode, mcs_index)
    except InvalidMcs as exc:
        raise InvalidField(str(exc)) from None
    phy = PhyHeader(mode, mcs_index, length, reserved)
    mac = MacHeader.from_bits(mac_bits)

    body = bits[TAG_BITS + n_header :]
    need = 8 * length
    if len(body) < need:
        raise Truncated(f"payload has {len(body)} bits, header promises {need}")
    tail = body[need:]
    if len(tail) >= 8 or tail.any():
        raise LengthMismatch(f"{len(tail)} bits follow the payload")
    return Frame(preamble, phy, mac, bits_to_bytes(body[:need]))


def write_frame_file(path, frame: Frame) -> None:
    with open(path, "wb") as fh:
        fh.write(bits_to_bytes(encode_frame(frame)))


def read_frame_file(path, mode: PhyMode) -> Frame:
    with open(path, "rb") as fh:
        data = fh.read()
    bits = bytes_to_bits(data)
    # the file is zero-padded to a byte boundary; the layout is already aligned
    return decode_frame(bits, mode)


# ---------------------------------------------------------------------------
# timing


def frame_airtime_s(frame: Frame, mcs: Mcs | None = None, channel: ChannelDescriptor | None = None) -> float:
    """On-air duration. Header bits ride on the frame's modulation uncoded
    (EH is their protection); payload bits pay the FEC code rate."""
    if channel is None:
        raise ValueError("channel is required")
    mcs = frame.mcs if mcs is None else mcs
    return airtime_s(frame.preamble, frame.mode, len(frame.payload), mcs, channel)


def airtime_s(preamble: Preamble, mode: PhyMode, payload_bytes: int, mcs: Mcs, channel: ChannelDescriptor) -> float:
    symbols = (
        preamble.symbols
        + Fraction(header_air_bits(mode), mcs.bits_per_symbol)
        + Fraction(8 * payload_bytes) / (mcs.bits_per_symbol * mcs.code_rate)
    )
    return float(symbols / (symbol_rate(channel) * 10**9))
