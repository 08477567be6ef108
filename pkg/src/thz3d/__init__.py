"""Sub-THz point-to-point stack: channel plan, PHY rate/budget model, frame codec,
pairnet MAC simulator."""

from thz3d.channel_plan import ChannelDescriptor, NoSuchChannel, build_plan, channel_by_id, overlaps
from thz3d.phy import (
    Fec,
    LinkConfig,
    Mcs,
    Modulation,
    PhyMode,
    UseCaseProfile,
    best_mcs,
    data_rate,
    max_range_m,
)

__all__ = [
    "ChannelDescriptor",
    "Fec",
    "LinkConfig",
    "Mcs",
    "Modulation",
    "NoSuchChannel",
    "PhyMode",
    "UseCaseProfile",
    "best_mcs",
    "build_plan",
    "channel_by_id",
    "data_rate",
    "max_range_m",
    "overlaps",
]
