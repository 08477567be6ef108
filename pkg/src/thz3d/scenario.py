"""Scenario presets, sweeps and report builders behind the CLI."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields
from typing import Optional, Union

import numpy as np

from thz3d.channel_plan import MULTIPLIERS, ChannelDescriptor, channel_by_id, smallest_channel
from thz3d.frame import MAX_FRAME_BYTES, Frame, FrameType, MacHeader, encode_frame, bits_to_bytes
from thz3d.mac import AckPolicy, SessionConfig, SessionTrace, simulate_session
from thz3d.phy import (
    PROFILES,
    Mcs,
    NoFeasibleMcs,
    PhyMode,
    RateUnattainable,
    UseCaseProfile,
    all_mcs,
    best_mcs,
    data_rate,
    get_profile,
    link_budget,
    max_range_m,
    truncate,
)

AUTO = "auto"


class ScenarioError(ValueError):
    pass


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _range_str(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.3f}"


# ---------------------------------------------------------------------------
# rate table


def run_rate_table() -> str:
    rows = []
    for mcs in all_mcs():
        for m in MULTIPLIERS:
            ch = smallest_channel(m)
            rows.append([mcs.mode.value, mcs.name, ch.id, f"{ch.bandwidth_ghz:.2f}", truncate(data_rate(mcs, ch))])
    return _csv(["mode", "mcs", "channel_id", "bandwidth_ghz", "rate_gbps"], rows)


# ---------------------------------------------------------------------------
# range figure


@dataclass(frozen=True)
class RangeAnchor:
    profile: str
    channel: ChannelDescriptor
    mcs: Mcs
    range_m: float
    narrowband_range_m: float  # same MCS on the 2.16 GHz channel


def range_anchors(min_rate_gbps: float = 100.0) -> dict[str, RangeAnchor]:
    out = {}
    narrow = smallest_channel(1)
    for name, profile in PROFILES.items():
        r = max_range_m(profile, min_rate_gbps=min_rate_gbps)
        ch = _rate_channel(profile.mcs, min_rate_gbps)
        out[name] = RangeAnchor(name, ch, profile.mcs, r.distance_m, max_range_m(profile, channel=narrow).distance_m)
    return out


def _rate_channel(mcs: Mcs, min_rate_gbps: float) -> ChannelDescriptor:
    from thz3d.phy import smallest_channel_for_rate

    return smallest_channel_for_rate(mcs, min_rate_gbps)


def _longest_reach(profile: UseCaseProfile, channel: ChannelDescriptor, min_rate_gbps: float = 0.0):
    best = None
    for mcs in all_mcs(PhyMode.THZ_SC):
        if float(data_rate(mcs, channel)) < min_rate_gbps:
            continue
        r = max_range_m(profile, mcs=mcs, channel=channel)
        if r.feasible and (best is None or r.distance_m > best[1]):
            best = (mcs, r.distance_m)
    return best


def run_range_figure(profiles: Optional[list[str]] = None, min_rate_gbps: float = 100.0) -> tuple[str, str]:
    """Range versus bandwidth for each profile. Returns (csv, summary)."""
    names = list(PROFILES) if profiles is None else profiles
    rows = []
    for name in names:
        profile = get_profile(name)
        for m in MULTIPLIERS:
            ch = smallest_channel(m)
            r = max_range_m(profile, channel=ch)
            reach = _longest_reach(profile, ch)
            fast = _longest_reach(profile, ch, min_rate_gbps)
            rows.append(
                [
                    name,
                    ch.id,
                    f"{ch.bandwidth_ghz:.2f}",
                    profile.mcs.name,
                    truncate(data_rate(profile.mcs, ch)),
                    _range_str(r.distance_m),
                    reach[0].name if reach else "",
                    _range_str(reach[1]) if reach else "",
                    fast[0].name if fast else "",
                    _range_str(fast[1]) if fast else "",
                ]
            )
    header = [
        "profile",
        "channel_id",
        "bandwidth_ghz",
        "mcs",
        "rate_gbps",
        "range_m",
        "longest_reach_mcs",
        "longest_reach_m",
        f"longest_reach_{min_rate_gbps:g}g_mcs",
        f"longest_reach_{min_rate_gbps:g}g_m",
    ]
    lines = [f"{min_rate_gbps:g} Gbit/s ranges (profile MCS, narrowest channel meeting the rate):"]
    for name, a in range_anchors(min_rate_gbps).items():
        if name not in names:
            continue
        lines.append(
            f"  {name}: {_range_str(a.range_m)} m on {a.channel.bandwidth_ghz:.2f} GHz ({a.mcs.name});"
            f" 2.16 GHz: {_range_str(a.narrowband_range_m)} m"
        )
    return _csv(header, rows), "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# kiosk download


@dataclass
class KioskReport:
    channel: ChannelDescriptor
    mcs: Mcs
    distance_m: float
    payload_bytes: int
    trace: SessionTrace

    @property
    def phy_rate_gbps(self) -> float:
        return float(data_rate(self.mcs, self.channel))

    @property
    def completion_time_s(self) -> Optional[float]:
        if self.payload_bytes == 0:
            return self.trace.end_time_s
        return self.trace.completion_time_s

    def text(self) -> str:
        ideal = self.payload_bytes * 8 / (self.phy_rate_gbps * 1e9)
        done = self.completion_time_s
        return (
            f"channel: {self.channel.id} ({self.channel.bandwidth_ghz:.2f} GHz)\n"
            f"mcs: {self.mcs.name}\n"
            f"phy_rate_gbps: {self.phy_rate_gbps:.2f}\n"
            f"distance_m: {self.distance_m:.3f}\n"
            f"payload_bytes: {self.payload_bytes}\n"
            f"ideal_time_s: {ideal:.6f}\n"
            f"completion_time_s: {'n/a' if done is None else f'{done:.6f}'}\n"
            f"goodput_gbps: {self.trace.goodput_gbps:.2f}\n"
            f"frames: {len(self.trace.entries)}\n"
        )


def kiosk_channel(distance_m: float, min_rate_gbps: float = 72.0) -> tuple[ChannelDescriptor, Mcs]:
    """Narrowest channel whose best SC MCS at ``distance_m`` reaches the rate."""
    profile = PROFILES["kiosk"]
    for m in MULTIPLIERS:
        ch = smallest_channel(m)
        try:
            mcs = best_mcs(profile.link(ch, distance_m))
        except NoFeasibleMcs:
            continue
        if data_rate(mcs, ch) >= min_rate_gbps:
            return ch, mcs
    raise RateUnattainable(f"kiosk link cannot carry {min_rate_gbps} Gbit/s at {distance_m} m")


def run_kiosk_download_demo(
    payload_bytes: int = 900_000_000,
    distance_m: float = 0.3,
    min_rate_gbps: float = 72.0,
    frame_payload_bytes: int = MAX_FRAME_BYTES,
    seed: int = 0,
) -> KioskReport:
    ch, mcs = kiosk_channel(distance_m, min_rate_gbps)
    link = PROFILES["kiosk"].link(ch, distance_m, mcs)
    config = SessionConfig(link, payload_bytes_total=payload_bytes, frame_payload_bytes=frame_payload_bytes)
    return KioskReport(ch, mcs, distance_m, payload_bytes, simulate_session(config, seed))


# ---------------------------------------------------------------------------
# scenario files


@dataclass(frozen=True)
class Scenario:
    profile: UseCaseProfile
    channels: tuple[ChannelDescriptor, ...]
    mcs: Union[Mcs, str] = AUTO
    distances: tuple[float, ...] = (1.0,)
    out: Optional[str] = None
    seed: int = 0
    session: dict = field(default_factory=dict)  # extra SessionConfig fields

    def __post_init__(self):
        if not self.channels:
            raise ScenarioError("channel sweep is empty")
        if not self.distances or any(not d > 0 for d in self.distances):
            raise ScenarioError("distances must be non-empty and positive")

    def link(self, channel: ChannelDescriptor, distance_m: float):
        link = self.profile.link(channel, distance_m)
        mcs = best_mcs(link) if self.mcs == AUTO else self.mcs
        return link.with_mcs(mcs)

    def points(self):
        for ch in self.channels:
            for d in self.distances:
                yield ch, d

    def session_config(self) -> SessionConfig:
        if len(self.channels) != 1 or len(self.distances) != 1:
            raise ScenarioError("a MAC session needs a single channel and distance")
        return SessionConfig(self.link(self.channels[0], self.distances[0]), **self.session)


_SESSION_TYPES = {f.name: f.type for f in fields(SessionConfig) if f.name != "link"}


def _session_value(key: str, raw: str):
    if key == "ack_policy":
        try:
            return AckPolicy[raw.upper()]
        except KeyError:
            raise ScenarioError(f"ack_policy must be NONE or PER_FRAME, got {raw!r}") from None
    if key == "frame_loss_probability" and raw.lower() in ("margin", "none"):
        return None
    if key == "probe_interval_s" and raw.lower() in ("none", "default"):
        return None
    if key == "probes_enabled":
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ScenarioError(f"probes_enabled must be a boolean, got {raw!r}")
        return raw.lower() in ("true", "1", "yes")
    kind = _SESSION_TYPES[key]
    if "int" in str(kind) and "float" not in str(kind):
        return int(raw.replace("_", ""))
    return float(raw)


def parse_channels(raw: str) -> tuple[ChannelDescriptor, ...]:
    out = []
    for part in raw.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-")
            out.extend(channel_by_id(i) for i in range(int(a), int(b) + 1))
        elif part:
            out.append(channel_by_id(int(part)))
    return tuple(out)


def parse_distances(raw: str) -> tuple[float, ...]:
    """``5`` / ``1,2,5`` / ``start:stop:count`` (log-spaced)."""
    if ":" in raw:
        a, b, n = raw.split(":")
        start, stop, count = float(a), float(b), int(n)
        if not (start > 0 and stop > 0 and count > 0):
            raise ScenarioError(f"bad distance sweep {raw!r}")
        return tuple(float(x) for x in np.geomspace(start, stop, count))
    return tuple(float(x) for x in raw.split(",") if x.strip())


def parse_mcs(raw: str) -> Union[Mcs, str]:
    return AUTO if raw.strip().lower() == AUTO else Mcs.parse(raw.strip())


def parse_scenario(text: str) -> Scenario:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        values[key] = raw
    try:
        profile = get_profile(values.pop("profile", "kiosk"))
        channels = parse_channels(values.pop("channel", "41"))
        mcs = parse_mcs(values.pop("mcs", AUTO))
        distances = parse_distances(values.pop("distance", "1.0"))
        out = values.pop("out", None)
        seed = int(values.pop("seed", "0"))
        session = {}
        for key, raw in values.items():
            if key not in _SESSION_TYPES:
                raise ScenarioError(f"unknown scenario key {key!r}")
            session[key] = _session_value(key, raw)
    except KeyError as exc:
        raise ScenarioError(str(exc)) from None
    return Scenario(profile, channels, mcs, distances, out, seed, session)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# budget sweep


def run_budget(scenario: Scenario) -> str:
    rows = []
    for ch, d in scenario.points():
        try:
            link = scenario.link(ch, d)
        except NoFeasibleMcs:
            rows.append([scenario.profile.name, ch.id, f"{ch.bandwidth_ghz:.2f}", f"{d:.3f}", "none"] + [""] * 9)
            continue
        b = link_budget(link)
        rows.append(
            [
                scenario.profile.name,
                ch.id,
                f"{ch.bandwidth_ghz:.2f}",
                f"{d:.3f}",
                link.mcs.name,
                truncate(data_rate(link.mcs, ch)),
                f"{b.fspl_db:.2f}",
                f"{b.rx_power_dbm:.2f}",
                f"{b.noise_floor_dbm:.2f}",
                f"{b.snr_db:.2f}",
                f"{b.evm_db:.2f}",
                f"{b.effective_snr_db:.2f}",
                f"{b.required_snr_db:.2f}",
                f"{b.margin_db:.2f}",
            ]
        )
    header = [
        "profile",
        "channel_id",
        "bandwidth_ghz",
        "distance_m",
        "mcs",
        "rate_gbps",
        "fspl_db",
        "rx_power_dbm",
        "noise_floor_dbm",
        "snr_db",
        "evm_db",
        "effective_snr_db",
        "required_snr_db",
        "margin_db",
    ]
    return _csv(header, rows)


# ---------------------------------------------------------------------------
# codec conformance vectors


def _pattern(n: int, step: int) -> bytes:
    return bytes((i * step) & 0xFF for i in range(n))


def conformance_frames() -> dict[str, Frame]:
    """Fixed frames whose encodings serve as conformance vectors."""
    sc_ctrl = Mcs.parse("BPSK-11/15")
    ook_ctrl = Mcs.parse("OOK-RS")
    return {
        "sc_beacon": Frame.build(sc_ctrl, MacHeader(FrameType.BEACON, 0, 0x3D01, 0x01, 0xFF, 0), bytes(2048)),
        "sc_data_64qam": Frame.build(
            Mcs.parse("64QAM-14/15"), MacHeader(FrameType.DATA, 1, 0x3D01, 0x02, 0x01, 7), _pattern(2048, 1)
        ),
        "sc_data_8apsk_long": Frame.build(
            Mcs.parse("8APSK-11/15"), MacHeader(FrameType.DATA, 0, 0xBEEF, 0x5A, 0xA5, 4095), _pattern(4099, 37)
        ),
        "ook_assoc_req": Frame.build(ook_ctrl, MacHeader(FrameType.ASSOC_REQ, 0, 0x0001, 0x02, 0x01, 1), bytes(2048)),
        "ook_data_ldpc": Frame.build(
            Mcs.parse("OOK-14/15"), MacHeader(FrameType.DATA, 1, 0xFFFF, 0xFF, 0x00, 2048), _pattern(2050, 255)
        ),
    }


def run_conformance_vectors() -> str:
    rows = []
    for name, frame in conformance_frames().items():
        bits = encode_frame(frame)
        rows.append([name, frame.mcs.mode.value, frame.mcs.name, len(bits), f"{frame.hcs:04x}", bits_to_bytes(bits).hex()])
    return _csv(["name", "mode", "mcs", "bits", "hcs", "hex"], rows)
