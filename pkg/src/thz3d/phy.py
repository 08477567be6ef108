"""MCS definitions, data rates and the link-budget engine."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple, Optional

from thz3d.channel_plan import ChannelDescriptor, smallest_channel, MULTIPLIERS

SPEED_OF_LIGHT = 3.0e8  # rounded value; the budget examples are worked with it
THERMAL_NOISE_DBM_HZ = -174.0

# symbols per second per 2.16 GHz of bandwidth, in GBd
SYMBOL_RATE_PER_UNIT_GBD = Fraction(176, 100)

SENSITIVITY_ANCHOR_DBM = -67.0
ANCHOR_REQUIRED_SNR_DB = 5.65  # -67 dBm minus the 2.16 GHz / 8 dB noise floor, rounded


class PhyMode(enum.Enum):
    THZ_SC = "SC"
    THZ_OOK = "OOK"


class Modulation(enum.Enum):
    BPSK = ("BPSK", 1, 2)
    QPSK = ("QPSK", 2, 4)
    PSK8 = ("8PSK", 3, 8)
    APSK8 = ("8APSK", 3, 8)
    QAM16 = ("16QAM", 4, 16)
    QAM64 = ("64QAM", 6, 64)
    OOK = ("OOK", 1, 2)

    def __init__(self, label: str, bits: int, order: int):
        self.label = label
        self.bits_per_symbol = bits
        self.order = order


class Fec(enum.Enum):
    LDPC_11_15 = ("11/15", Fraction(1056, 1440), 4e-2)
    LDPC_14_15 = ("14/15", Fraction(1344, 1440), 1e-3)
    RS_240_224 = ("RS", Fraction(224, 240), 1e-3)

    def __init__(self, label: str, code_rate: Fraction, ber_target: float):
        self.label = label
        self.code_rate = code_rate
        # uncoded BER the decoder is assumed to clean up
        self.ber_target = ber_target


SC_MODULATIONS = (
    Modulation.BPSK,
    Modulation.QPSK,
    Modulation.PSK8,
    Modulation.APSK8,
    Modulation.QAM16,
    Modulation.QAM64,
)


class InvalidMcs(ValueError):
    pass


@dataclass(frozen=True)
class Mcs:
    mode: PhyMode
    modulation: Modulation
    fec: Fec

    def __post_init__(self):
        if self.mode is PhyMode.THZ_SC:
            ok = self.modulation in SC_MODULATIONS and self.fec is not Fec.RS_240_224
        else:
            ok = self.modulation is Modulation.OOK
        if not ok:
            raise InvalidMcs(f"{self.modulation.label}/{self.fec.label} is not defined for {self.mode.name}")

    @property
    def bits_per_symbol(self) -> int:
        return self.modulation.bits_per_symbol

    @property
    def code_rate(self) -> Fraction:
        return self.fec.code_rate

    @property
    def mandatory(self) -> bool:
        if self.mode is PhyMode.THZ_SC:
            return self.modulation in (Modulation.BPSK, Modulation.QPSK)
        return self.fec is Fec.RS_240_224

    @property
    def name(self) -> str:
        return f"{self.modulation.label}-{self.fec.label}"

    @property
    def index(self) -> int:
        """Value carried in the PHY header MCS field."""
        return all_mcs(self.mode).index(self)

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> "Mcs":
        """Parse names like ``64QAM-14/15``, ``bpsk-11/15`` or ``OOK-RS``."""
        wanted = text.strip().upper()
        for mcs in all_mcs():
            if mcs.name.upper() == wanted:
                return mcs
        raise InvalidMcs(f"unknown MCS {text!r}; expected one of {', '.join(m.name for m in all_mcs())}")

    @classmethod
    def from_index(cls, mode: PhyMode, index: int) -> "Mcs":
        table = all_mcs(mode)
        if not 0 <= index < len(table):
            raise InvalidMcs(f"MCS index {index} is reserved for {mode.name}")
        return table[index]


def all_mcs(mode: Optional[PhyMode] = None) -> tuple[Mcs, ...]:
    if mode is None:
        return _SC_TABLE + _OOK_TABLE
    return _SC_TABLE if mode is PhyMode.THZ_SC else _OOK_TABLE


_SC_TABLE = tuple(
    Mcs(PhyMode.THZ_SC, mod, fec) for mod in SC_MODULATIONS for fec in (Fec.LDPC_11_15, Fec.LDPC_14_15)
)
_OOK_TABLE = tuple(Mcs(PhyMode.THZ_OOK, Modulation.OOK, fec) for fec in (Fec.RS_240_224, Fec.LDPC_11_15, Fec.LDPC_14_15))


def control_mcs(mode: PhyMode) -> Mcs:
    """Most robust mandatory MCS of a mode; used for beacons, association and ACKs."""
    if mode is PhyMode.THZ_SC:
        return Mcs(mode, Modulation.BPSK, Fec.LDPC_11_15)
    return Mcs(mode, Modulation.OOK, Fec.RS_240_224)


# ---------------------------------------------------------------------------
# rates


def symbol_rate(channel: ChannelDescriptor) -> Fraction:
    """Symbol rate in GBd."""
    return channel.multiplier * SYMBOL_RATE_PER_UNIT_GBD


def data_rate(mcs: Mcs, channel: ChannelDescriptor) -> Fraction:
    """PHY data rate in Gbit/s, exact."""
    return symbol_rate(channel) * mcs.bits_per_symbol * mcs.code_rate


def truncate(value, places: int = 2) -> str:
    """Fixed-point text truncated (not rounded) toward zero."""
    q = Fraction(value)
    scale = 10**places
    n = math.trunc(q * scale)
    sign = "-" if n < 0 or (n == 0 and q < 0) else ""
    n = abs(n)
    return f"{sign}{n // scale}.{n % scale:0{places}d}"


# ---------------------------------------------------------------------------
# propagation and noise


def fspl_db(carrier_ghz: float, distance_m: float) -> float:
    if carrier_ghz <= 0 or distance_m <= 0:
        raise ValueError("carrier and distance must be positive")
    return 20 * math.log10(4 * math.pi * distance_m * carrier_ghz * 1e9 / SPEED_OF_LIGHT)


def noise_floor_dbm(bandwidth_ghz: float, noise_figure_db: float) -> float:
    if bandwidth_ghz <= 0:
        raise ValueError("bandwidth must be positive")
    return THERMAL_NOISE_DBM_HZ + 10 * math.log10(bandwidth_ghz * 1e9) + noise_figure_db


def effective_snr_db(snr_db: float, evm_db: float) -> float:
    """SNR after adding the transmitter EVM as an independent noise floor."""
    noise = 10 ** (-snr_db / 10) + 10 ** (evm_db / 10)
    return -10 * math.log10(noise)


# ---------------------------------------------------------------------------
# EVM and SNR thresholds

EVM_BASE_DB = {
    Modulation.OOK: -15.0,
    Modulation.BPSK: -15.0,
    Modulation.QPSK: -15.0,
    Modulation.APSK8: -17.0,
    Modulation.PSK8: -18.0,
    Modulation.QAM16: -18.0,
    Modulation.QAM64: -22.0,
}
EVM_RELAXATION_DB_PER_DOUBLING = 0.6
EVM_FLOOR_DB = -22.0
EVM_CEILING_DB = -3.0


def evm_db(mcs: Mcs, multiplier: int) -> float:
    """Transmit EVM for an MCS on a channel of ``multiplier`` x 2.16 GHz."""
    value = EVM_BASE_DB[mcs.modulation] + EVM_RELAXATION_DB_PER_DOUBLING * math.log2(multiplier)
    return min(max(value, EVM_FLOOR_DB), EVM_CEILING_DB)


# Eb/N0 (dB) at which the uncoded constellation reaches the FEC's pre-decoding
# BER target over AWGN.  Regenerate with scripts/derive_thresholds.py.
PRE_FEC_EBN0_DB = {
    (Modulation.BPSK, 4e-2): 1.854,
    (Modulation.BPSK, 1e-3): 6.790,
    (Modulation.QPSK, 4e-2): 1.854,
    (Modulation.QPSK, 1e-3): 6.790,
    (Modulation.PSK8, 4e-2): 4.399,
    (Modulation.PSK8, 1e-3): 10.010,
    (Modulation.APSK8, 4e-2): 4.228,
    (Modulation.APSK8, 1e-3): 8.983,
    (Modulation.QAM16, 4e-2): 5.124,
    (Modulation.QAM16, 1e-3): 10.522,
    (Modulation.QAM64, 4e-2): 8.884,
    (Modulation.QAM64, 1e-3): 14.767,
    (Modulation.OOK, 4e-2): 4.864,
    (Modulation.OOK, 1e-3): 9.800,
}


def calibration_offset_db(mode: PhyMode, table: Optional[dict] = None) -> float:
    """Per-mode shift placing the 11/15 LDPC, 2.16 GHz sensitivity on the anchor."""
    table = PRE_FEC_EBN0_DB if table is None else table
    anchor_mod = Modulation.BPSK if mode is PhyMode.THZ_SC else Modulation.OOK
    return ANCHOR_REQUIRED_SNR_DB - table[(anchor_mod, Fec.LDPC_11_15.ber_target)]


def required_snr_db(mcs: Mcs, table: Optional[dict] = None) -> float:
    table = PRE_FEC_EBN0_DB if table is None else table
    return table[(mcs.modulation, mcs.fec.ber_target)] + calibration_offset_db(mcs.mode, table)


def required_snr_table(table: Optional[dict] = None) -> dict[Mcs, float]:
    return {mcs: required_snr_db(mcs, table) for mcs in all_mcs()}


def sensitivity_dbm(mcs: Mcs, bandwidth_ghz: float, noise_figure_db: float) -> float:
    return noise_floor_dbm(bandwidth_ghz, noise_figure_db) + required_snr_db(mcs)


# ---------------------------------------------------------------------------
# links and profiles


@dataclass(frozen=True)
class LinkConfig:
    tx_power_dbm: float
    tx_gain_db: float
    rx_gain_db: float
    distance_m: float
    channel: ChannelDescriptor
    mcs: Optional[Mcs] = None
    noise_figure_db: float = 8.0
    carrier_ghz: float = 300.0
    absorption_db_per_km: float = 0.0

    def __post_init__(self):
        if not self.distance_m > 0:
            raise ValueError(f"distance must be positive, got {self.distance_m}")

    def with_distance(self, distance_m: float) -> "LinkConfig":
        return replace(self, distance_m=distance_m)

    def with_mcs(self, mcs: Mcs) -> "LinkConfig":
        return replace(self, mcs=mcs)


@dataclass(frozen=True)
class UseCaseProfile:
    name: str
    tx_power_dbm: float
    tx_gain_db: float
    rx_gain_db: float
    modulation: Modulation
    absorption_db_per_km: float
    fec: Fec = Fec.LDPC_14_15
    noise_figure_db: float = 8.0
    carrier_ghz: float = 300.0

    @property
    def mcs(self) -> Mcs:
        return Mcs(PhyMode.THZ_SC, self.modulation, self.fec)

    def link(self, channel: ChannelDescriptor, distance_m: float, mcs: Optional[Mcs] = None) -> LinkConfig:
        return LinkConfig(
            tx_power_dbm=self.tx_power_dbm,
            tx_gain_db=self.tx_gain_db,
            rx_gain_db=self.rx_gain_db,
            distance_m=distance_m,
            channel=channel,
            mcs=self.mcs if mcs is None else mcs,
            noise_figure_db=self.noise_figure_db,
            carrier_ghz=self.carrier_ghz,
            absorption_db_per_km=self.absorption_db_per_km,
        )


DEFAULT_ABSORPTION_DB_PER_KM = 2.6

PROFILES = {
    p.name: p
    for p in (
        UseCaseProfile("fronthaul_backhaul", 25.0, 30.0, 30.0, Modulation.QAM64, DEFAULT_ABSORPTION_DB_PER_KM),
        UseCaseProfile("data_center", 10.0, 30.0, 30.0, Modulation.QAM64, 0.0),
        UseCaseProfile("kiosk", 0.0, 24.0, 12.0, Modulation.APSK8, DEFAULT_ABSORPTION_DB_PER_KM),
        UseCaseProfile("intra_device", 0.0, 6.0, 6.0, Modulation.APSK8, 0.0),
    )
}


def get_profile(name: str) -> UseCaseProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; expected one of {', '.join(PROFILES)}") from None


def rx_power_dbm(link: LinkConfig) -> float:
    return (
        link.tx_power_dbm
        + link.tx_gain_db
        + link.rx_gain_db
        - fspl_db(link.carrier_ghz, link.distance_m)
        - link.absorption_db_per_km * link.distance_m / 1000
    )


class Feasibility(NamedTuple):
    feasible: bool
    margin_db: float


@dataclass(frozen=True)
class LinkBudget:
    """Every term of a link budget, for display."""

    tx_power_dbm: float
    tx_gain_db: float
    rx_gain_db: float
    fspl_db: float
    absorption_db: float
    rx_power_dbm: float
    noise_floor_dbm: float
    snr_db: float
    evm_db: float
    effective_snr_db: float
    required_snr_db: float
    margin_db: float

    @property
    def feasible(self) -> bool:
        return self.margin_db >= 0


def _require_mcs(link: LinkConfig) -> Mcs:
    if link.mcs is None:
        raise ValueError("link has no MCS")
    return link.mcs


def link_budget(link: LinkConfig) -> LinkBudget:
    mcs = _require_mcs(link)
    rx = rx_power_dbm(link)
    noise = noise_floor_dbm(link.channel.bandwidth_ghz, link.noise_figure_db)
    evm = evm_db(mcs, link.channel.multiplier)
    eff = effective_snr_db(rx - noise, evm)
    req = required_snr_db(mcs)
    return LinkBudget(
        tx_power_dbm=link.tx_power_dbm,
        tx_gain_db=link.tx_gain_db,
        rx_gain_db=link.rx_gain_db,
        fspl_db=fspl_db(link.carrier_ghz, link.distance_m),
        absorption_db=link.absorption_db_per_km * link.distance_m / 1000,
        rx_power_dbm=rx,
        noise_floor_dbm=noise,
        snr_db=rx - noise,
        evm_db=evm,
        effective_snr_db=eff,
        required_snr_db=req,
        margin_db=eff - req,
    )


def link_feasible(link: LinkConfig) -> Feasibility:
    margin = link_budget(link).margin_db
    return Feasibility(margin >= 0, margin)


class NoFeasibleMcs(ValueError):
    pass


class RateUnattainable(ValueError):
    pass


class MaxRange(NamedTuple):
    distance_m: float
    feasible: bool


def _max_feasible_distance(link: LinkConfig) -> MaxRange:
    mcs = _require_mcs(link)
    # with d -> 0 the effective SNR tends to -EVM; nothing closes past that
    if -evm_db(mcs, link.channel.multiplier) <= required_snr_db(mcs):
        return MaxRange(0.0, False)

    def ok(d: float) -> bool:
        return link_feasible(link.with_distance(d)).feasible

    lo = 1e-9
    if not ok(lo):
        return MaxRange(0.0, False)
    hi = 1.0
    while ok(hi):
        lo, hi = hi, hi * 2
        if hi > 1e9:
            return MaxRange(math.inf, True)
    # bisect down to adjacent floats; lo is always feasible
    while True:
        mid = (lo + hi) / 2
        if mid <= lo or mid >= hi:
            break
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return MaxRange(lo, True)


def max_range_m(
    profile: UseCaseProfile,
    mcs: Optional[Mcs] = None,
    channel: Optional[ChannelDescriptor] = None,
    min_rate_gbps: Optional[float] = None,
) -> MaxRange:
    """Largest distance at which the profile's link still closes.

    Without ``channel`` the smallest channel meeting ``min_rate_gbps`` is used
    (the 2.16 GHz channel 1 when no rate floor is given).
    """
    mcs = profile.mcs if mcs is None else mcs
    if channel is None:
        channel = smallest_channel_for_rate(mcs, min_rate_gbps or 0)
    if min_rate_gbps is not None and data_rate(mcs, channel) < Fraction(min_rate_gbps):
        raise RateUnattainable(
            f"{mcs} on {channel.bandwidth_ghz} GHz gives {float(data_rate(mcs, channel)):.2f} Gbit/s"
            f" < {min_rate_gbps} Gbit/s"
        )
    return _max_feasible_distance(profile.link(channel, 1.0, mcs))


def smallest_channel_for_rate(mcs: Mcs, min_rate_gbps: float) -> ChannelDescriptor:
    for m in MULTIPLIERS:
        channel = smallest_channel(m)
        if data_rate(mcs, channel) >= Fraction(min_rate_gbps):
            return channel
    raise RateUnattainable(f"no channel carries {min_rate_gbps} Gbit/s with {mcs}")


def best_mcs(link: LinkConfig, mode: PhyMode = PhyMode.THZ_SC) -> Mcs:
    """Highest-rate feasible MCS of ``mode`` for the link (``link.mcs`` is ignored)."""
    best = None
    for mcs in all_mcs(mode):
        if not link_feasible(link.with_mcs(mcs)).feasible:
            continue
        key = (data_rate(mcs, link.channel), -mcs.modulation.order)
        if best is None or key > best[0]:
            best = (key, mcs)
    if best is None:
        raise NoFeasibleMcs(f"no {mode.name} MCS closes the link at {link.distance_m} m")
    return best[1]
