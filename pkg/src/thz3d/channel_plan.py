"""The 69-channel plan over 252.72-321.84 GHz.

Frequencies are kept as integer centi-GHz (units of 10 MHz) so that channel
edges and bandwidths compare exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

BAND_LOW_CGHZ = 25272
BAND_HIGH_CGHZ = 32184
UNIT_CGHZ = 216  # 2.16 GHz
UNITS_IN_BAND = (BAND_HIGH_CGHZ - BAND_LOW_CGHZ) // UNIT_CGHZ  # 32

# bandwidth classes, in ascending order; ids follow this order
MULTIPLIERS = (1, 2, 4, 6, 8, 12, 24, 32)

DEFAULT_CHANNEL_ID = 41
FULL_BAND_CHANNEL_ID = 69


class NoSuchChannel(KeyError):
    pass


@dataclass(frozen=True, order=True)
class ChannelDescriptor:
    id: int
    center_cghz: int
    multiplier: int

    @property
    def bandwidth_cghz(self) -> int:
        return self.multiplier * UNIT_CGHZ

    @property
    def low_cghz(self) -> int:
        return self.center_cghz - self.bandwidth_cghz // 2

    @property
    def high_cghz(self) -> int:
        return self.center_cghz + self.bandwidth_cghz // 2

    @property
    def center_ghz(self) -> float:
        return self.center_cghz / 100

    @property
    def bandwidth_ghz(self) -> float:
        return self.bandwidth_cghz / 100

    @property
    def bandwidth_exact_ghz(self) -> Fraction:
        return Fraction(self.bandwidth_cghz, 100)

    @property
    def bandwidth_hz(self) -> float:
        return self.bandwidth_cghz * 1e7


@lru_cache(maxsize=1)
def _plan() -> tuple[ChannelDescriptor, ...]:
    channels = []
    next_id = 1
    for m in MULTIPLIERS:
        for k in range(UNITS_IN_BAND // m):
            low = BAND_LOW_CGHZ + k * m * UNIT_CGHZ
            channels.append(ChannelDescriptor(next_id, low + m * UNIT_CGHZ // 2, m))
            next_id += 1
    return tuple(channels)


def build_plan() -> list[ChannelDescriptor]:
    """All 69 channels, ordered by id (ascending bandwidth, then frequency)."""
    return list(_plan())


def channel_by_id(channel_id: int) -> ChannelDescriptor:
    plan = _plan()
    if not 1 <= channel_id <= len(plan):
        raise NoSuchChannel(f"no channel with id {channel_id}; valid ids are 1..{len(plan)}")
    return plan[channel_id - 1]


def channels_with_multiplier(multiplier: int) -> list[ChannelDescriptor]:
    return [c for c in _plan() if c.multiplier == multiplier]


def smallest_channel(multiplier: int) -> ChannelDescriptor:
    """Lowest-frequency channel of a bandwidth class."""
    return channels_with_multiplier(multiplier)[0]


def overlaps(a: ChannelDescriptor, b: ChannelDescriptor) -> bool:
    # open intervals: channels that only share an edge do not overlap
    return a.low_cghz < b.high_cghz and b.low_cghz < a.high_cghz


def plan_csv() -> str:
    lines = ["id,center_ghz,bandwidth_ghz"]
    for c in _plan():
        lines.append(f"{c.id},{c.center_cghz / 100:.2f},{c.bandwidth_cghz / 100:.2f}")
    return "\n".join(lines) + "\n"
