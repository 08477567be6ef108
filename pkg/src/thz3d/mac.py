"""Pairnet MAC: PRC and PRDEV state machines on a discrete-event clock.

The step functions are pure: ``(state, event) -> (state, actions)``.
``simulate_session`` owns the clock, the shared medium and frame loss.
"""

from __future__ import annotations

import enum
import heapq
import random
import struct
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from thz3d.channel_plan import ChannelDescriptor
from thz3d.frame import (
    MAX_FRAME_BYTES,
    MIN_FRAME_BYTES,
    Frame,
    FrameType,
    MacHeader,
    Preamble,
    airtime_s,
    frame_airtime_s,
    frame_bit_length,
    header_air_bits,
)
from thz3d.phy import LinkConfig, Mcs, control_mcs, data_rate, link_feasible, symbol_rate

PRC = "PRC"
PRDEV = "PRDEV"


class AckPolicy(enum.Enum):
    NONE = 0
    PER_FRAME = 1


class PrcPhase(enum.Enum):
    PSP_BEACONING = "PSP_BEACONING"
    AWAIT_FIRST_DATA = "AWAIT_FIRST_DATA"
    PAP_ACTIVE = "PAP_ACTIVE"


class PrdevPhase(enum.Enum):
    SCANNING = "SCANNING"
    AWAIT_ASSOC_RSP = "AWAIT_ASSOC_RSP"
    PAP_ACTIVE = "PAP_ACTIVE"


class EventKind(enum.IntEnum):
    # value doubles as the tie-break order for simultaneous events
    FRAME_ARRIVAL = 0
    TIMER_EXPIRY = 1
    APP_DATA_READY = 2


@dataclass(frozen=True)
class SimEvent:
    time_s: float
    kind: EventKind
    frame: Optional[Frame] = None
    timer: Optional[str] = None
    data_bytes: int = 0
    final: bool = False


@dataclass(frozen=True)
class Transmit:
    frame: Frame
    start_s: float
    app_bytes: int = 0


@dataclass(frozen=True)
class SetTimer:
    name: str
    at_s: float


Action = Union[Transmit, SetTimer]


@dataclass(frozen=True)
class MacParams:
    """Everything both nodes agree on before the session starts."""

    mcs: Mcs
    channel: ChannelDescriptor
    sifs_s: float = 1e-6
    beacon_period_s: float = 10e-3
    slot_count: int = 8
    slot_duration_s: float = 100e-6
    prc_timeout_s: float = 100e-3
    frame_payload_bytes: int = 65536
    ack_policy: AckPolicy = AckPolicy.NONE
    probes_enabled: bool = True
    probe_interval_s: Optional[float] = None
    max_retries: int = 3
    higher_layer_bytes: int = 0
    pairnet_id: int = 0x3D01
    prc_id: int = 1
    prdev_id: int = 2

    def __post_init__(self):
        if self.slot_count < 1:
            raise ValueError("at least one access slot is required")
        if not MIN_FRAME_BYTES <= self.frame_payload_bytes <= MAX_FRAME_BYTES:
            raise ValueError(f"frame payload {self.frame_payload_bytes} outside [{MIN_FRAME_BYTES}, {MAX_FRAME_BYTES}]")
        if self.higher_layer_bytes > MAX_FRAME_BYTES:
            raise ValueError("higher-layer setup blob does not fit in one frame")

    @property
    def control_mcs(self) -> Mcs:
        return control_mcs(self.mcs.mode)

    @property
    def probe_every_s(self) -> float:
        return self.prc_timeout_s / 2 if self.probe_interval_s is None else self.probe_interval_s

    def airtime(self, frame: Frame) -> float:
        return frame_airtime_s(frame, channel=self.channel)

    @property
    def ack_airtime_s(self) -> float:
        return airtime_s(Preamble.SHORT, self.mcs.mode, MIN_FRAME_BYTES, self.control_mcs, self.channel)


# ---------------------------------------------------------------------------
# frame builders

_BEACON_BODY = struct.Struct(">HQQQ")  # slots, slot duration, beacon period, timeout (ps)


@lru_cache(maxsize=64)
def _zeros(n: int) -> bytes:
    return bytes(n)


def _padded(body: bytes) -> bytes:
    return body + _zeros(MIN_FRAME_BYTES - len(body)) if len(body) < MIN_FRAME_BYTES else body


def _ps(seconds: float) -> int:
    return round(seconds * 1e12)


def _frame(p: MacParams, ftype: FrameType, src: int, dest: int, seq: int, payload: bytes, mcs=None, ack=0) -> Frame:
    header = MacHeader(ftype, ack, p.pairnet_id, src, dest, seq % 4096)
    return Frame.build(p.control_mcs if mcs is None else mcs, header, payload)


def beacon_frame(p: MacParams, seq: int) -> Frame:
    body = _BEACON_BODY.pack(p.slot_count, _ps(p.slot_duration_s), _ps(p.beacon_period_s), _ps(p.prc_timeout_s))
    return _frame(p, FrameType.BEACON, p.prc_id, 0xFF, seq, _padded(body))


def parse_beacon(frame: Frame) -> dict:
    slots, slot_ps, period_ps, timeout_ps = _BEACON_BODY.unpack_from(frame.payload)
    return {
        "slot_count": slots,
        "slot_duration_s": slot_ps / 1e12,
        "beacon_period_s": period_ps / 1e12,
        "prc_timeout_s": timeout_ps / 1e12,
    }


# ---------------------------------------------------------------------------
# PRC


@dataclass(frozen=True)
class PrcState:
    params: MacParams
    phase: PrcPhase = PrcPhase.PSP_BEACONING
    beacon_due: Optional[float] = None
    timeout_deadline: Optional[float] = None
    slot_start_s: Optional[float] = None  # first access slot after the latest beacon
    seq: int = 0

    def in_access_slot(self, t: float) -> bool:
        if self.slot_start_s is None:
            return False
        p = self.params
        end = self.slot_start_s + p.slot_count * p.slot_duration_s
        return self.slot_start_s - 1e-12 <= t < end


def prc_step(state: PrcState, event: SimEvent) -> tuple[PrcState, list[Action]]:
    p = state.params
    now = event.time_s

    if event.kind is EventKind.TIMER_EXPIRY:
        if event.timer == "beacon" and state.phase is PrcPhase.PSP_BEACONING and now == state.beacon_due:
            beacon = beacon_frame(p, state.seq)
            nxt = now + p.beacon_period_s
            new = replace(
                state, beacon_due=nxt, slot_start_s=now + p.airtime(beacon) + p.sifs_s, seq=state.seq + 1
            )
            return new, [Transmit(beacon, now), SetTimer("beacon", nxt)]
        if event.timer == "timeout" and state.phase is not PrcPhase.PSP_BEACONING and now == state.timeout_deadline:
            # nothing heard from the PRDEV: back to the setup period
            return replace(state, phase=PrcPhase.PSP_BEACONING, timeout_deadline=None, beacon_due=now), [
                SetTimer("beacon", now)
            ]
        return state, []

    if event.kind is not EventKind.FRAME_ARRIVAL or event.frame is None:
        return state, []
    frame = event.frame
    hdr = frame.mac_header
    if hdr.dest_id != p.prc_id or hdr.src_id != p.prdev_id or hdr.pairnet_id != p.pairnet_id:
        return state, []
    ftype = hdr.frame_type

    if state.phase is PrcPhase.PSP_BEACONING:
        if ftype is not FrameType.ASSOC_REQ or not state.in_access_slot(now - p.airtime(frame)):
            return state, []
        return _associate(state, now)

    # associated: every frame from the PRDEV pushes the timeout forward
    deadline = now + p.prc_timeout_s
    actions: list[Action] = [SetTimer("timeout", deadline)]
    state = replace(state, timeout_deadline=deadline)
    if ftype is FrameType.ASSOC_REQ:
        # our response was lost; answer again
        return _associate(state, now)
    if ftype is FrameType.DISASSOC_REQ:
        start = now + p.sifs_s
        return replace(state, phase=PrcPhase.PSP_BEACONING, timeout_deadline=None, beacon_due=start), [
            SetTimer("beacon", start)
        ]
    if ftype in (FrameType.DATA, FrameType.PROBE_REQ):
        state = replace(state, phase=PrcPhase.PAP_ACTIVE)
        if ftype is FrameType.DATA and hdr.ack_policy:
            ack = _frame(p, FrameType.ACK, p.prc_id, p.prdev_id, hdr.seq_num, _zeros(MIN_FRAME_BYTES))
            actions.append(Transmit(ack, now + p.sifs_s))
    return state, actions


def _associate(state: PrcState, now: float) -> tuple[PrcState, list[Action]]:
    p = state.params
    rsp = _frame(p, FrameType.ASSOC_RSP, p.prc_id, p.prdev_id, state.seq, _padded(_zeros(p.higher_layer_bytes)))
    start = now + p.sifs_s
    deadline = start + p.airtime(rsp) + p.prc_timeout_s
    new = replace(
        state,
        phase=PrcPhase.AWAIT_FIRST_DATA,
        beacon_due=None,
        slot_start_s=None,
        timeout_deadline=deadline,
        seq=state.seq + 1,
    )
    return new, [Transmit(rsp, start), SetTimer("timeout", deadline)]


# ---------------------------------------------------------------------------
# PRDEV


@dataclass(frozen=True)
class PrdevState:
    params: MacParams
    phase: PrdevPhase = PrdevPhase.SCANNING
    pending_payload_bytes: int = 0
    app_complete: bool = False
    finished: bool = False
    tx_due: Optional[float] = None
    probe_due: Optional[float] = None
    ack_due: Optional[float] = None
    inflight_bytes: int = 0
    inflight_seq: Optional[int] = None
    retries: int = 0
    seq: int = 0
    last_tx_end: float = float("-inf")

    @property
    def idle(self) -> bool:
        return self.tx_due is None and self.ack_due is None


def prdev_step(state: PrdevState, event: SimEvent) -> tuple[PrdevState, list[Action]]:
    p = state.params
    now = event.time_s

    if event.kind is EventKind.APP_DATA_READY:
        state = replace(
            state,
            pending_payload_bytes=state.pending_payload_bytes + event.data_bytes,
            app_complete=state.app_complete or event.final,
        )
        if state.phase is not PrdevPhase.PAP_ACTIVE or not state.idle:
            return state, []
        state = replace(state, probe_due=None)
        earliest = state.last_tx_end + p.sifs_s
        if earliest > now:
            return replace(state, tx_due=earliest), [SetTimer("tx", earliest)]
        return _transmit_opportunity(state, now)

    if event.kind is EventKind.TIMER_EXPIRY:
        if state.phase is not PrdevPhase.PAP_ACTIVE:
            return state, []
        if event.timer == "tx" and now == state.tx_due:
            return _transmit_opportunity(replace(state, tx_due=None), now)
        if event.timer == "probe" and now == state.probe_due:
            if state.pending_payload_bytes or state.app_complete or not state.idle:
                return replace(state, probe_due=None), []
            probe = _frame(p, FrameType.PROBE_REQ, p.prdev_id, p.prc_id, state.seq, _zeros(MIN_FRAME_BYTES))
            end = now + p.airtime(probe)
            nxt = end + p.probe_every_s
            return replace(state, seq=state.seq + 1, last_tx_end=end, probe_due=nxt), [
                Transmit(probe, now),
                SetTimer("probe", nxt),
            ]
        if event.timer == "ack" and now == state.ack_due:
            if state.retries < p.max_retries:
                return _send_data(replace(state, retries=state.retries + 1, ack_due=None), now, state.inflight_bytes, state.inflight_seq)
            # give up on this frame
            dropped = replace(
                state,
                pending_payload_bytes=state.pending_payload_bytes - state.inflight_bytes,
                inflight_bytes=0,
                inflight_seq=None,
                retries=0,
                ack_due=None,
            )
            return _transmit_opportunity(dropped, now)
        return state, []

    if event.kind is not EventKind.FRAME_ARRIVAL or event.frame is None:
        return state, []
    frame = event.frame
    hdr = frame.mac_header
    if hdr.pairnet_id != p.pairnet_id or hdr.src_id != p.prc_id:
        return state, []
    ftype = hdr.frame_type

    if ftype is FrameType.BEACON:
        if state.finished:
            return state, []
        # also covers a PRC that timed us out: the pairnet has to be set up again
        info = parse_beacon(frame)
        params = replace(
            p,
            slot_count=info["slot_count"],
            slot_duration_s=info["slot_duration_s"],
            prc_timeout_s=info["prc_timeout_s"],
        )
        req = _frame(params, FrameType.ASSOC_REQ, p.prdev_id, p.prc_id, state.seq, _padded(_zeros(p.higher_layer_bytes)))
        new = replace(
            state,
            params=params,
            phase=PrdevPhase.AWAIT_ASSOC_RSP,
            tx_due=None,
            probe_due=None,
            ack_due=None,
            inflight_bytes=0,
            inflight_seq=None,
            retries=0,
            seq=state.seq + 1,
        )
        # first access slot opens one SIFS after the beacon ends
        return new, [Transmit(req, now + p.sifs_s)]

    if ftype is FrameType.ASSOC_RSP and hdr.dest_id == p.prdev_id:
        if state.phase is not PrdevPhase.AWAIT_ASSOC_RSP:
            return state, []
        start = now + p.sifs_s
        return replace(state, phase=PrdevPhase.PAP_ACTIVE, last_tx_end=now, tx_due=start), [SetTimer("tx", start)]

    if ftype is FrameType.ACK and hdr.dest_id == p.prdev_id:
        if state.phase is not PrdevPhase.PAP_ACTIVE or state.ack_due is None or hdr.seq_num != state.inflight_seq:
            return state, []
        start = now + p.sifs_s
        acked = replace(
            state,
            pending_payload_bytes=state.pending_payload_bytes - state.inflight_bytes,
            inflight_bytes=0,
            inflight_seq=None,
            retries=0,
            ack_due=None,
            last_tx_end=now,
            tx_due=start,
        )
        return acked, [SetTimer("tx", start)]

    return state, []


def _transmit_opportunity(state: PrdevState, now: float) -> tuple[PrdevState, list[Action]]:
    p = state.params
    if state.pending_payload_bytes > 0:
        n = min(state.pending_payload_bytes, p.frame_payload_bytes)
        return _send_data(replace(state, probe_due=None), now, n, state.seq % 4096, new_seq=True)
    if state.app_complete:
        bye = _frame(p, FrameType.DISASSOC_REQ, p.prdev_id, p.prc_id, state.seq, _zeros(MIN_FRAME_BYTES))
        new = replace(
            state,
            phase=PrdevPhase.SCANNING,
            finished=True,
            seq=state.seq + 1,
            tx_due=None,
            probe_due=None,
            last_tx_end=now + p.airtime(bye),
        )
        return new, [Transmit(bye, now)]
    if p.probes_enabled:
        due = max(now, state.last_tx_end + p.probe_every_s)
        return replace(state, probe_due=due), [SetTimer("probe", due)]
    return state, []


def _send_data(state: PrdevState, now: float, n: int, seq: int, new_seq: bool = False) -> tuple[PrdevState, list[Action]]:
    p = state.params
    ack = 1 if p.ack_policy is AckPolicy.PER_FRAME else 0
    payload = _zeros(max(n, MIN_FRAME_BYTES))
    frame = _frame(p, FrameType.DATA, p.prdev_id, p.prc_id, seq, payload, mcs=p.mcs, ack=ack)
    end = now + p.airtime(frame)
    state = replace(state, last_tx_end=end, seq=state.seq + 1 if new_seq else state.seq)
    if ack:
        due = end + p.sifs_s + p.ack_airtime_s + p.sifs_s
        state = replace(state, inflight_bytes=n, inflight_seq=seq, ack_due=due)
        return state, [Transmit(frame, now, n), SetTimer("ack", due)]
    nxt = end + p.sifs_s
    state = replace(state, pending_payload_bytes=state.pending_payload_bytes - n, tx_due=nxt)
    return state, [Transmit(frame, now, n), SetTimer("tx", nxt)]


# ---------------------------------------------------------------------------
# session simulation


@dataclass(frozen=True)
class SessionConfig:
    link: LinkConfig
    sifs_s: float = 1e-6
    beacon_period_s: float = 10e-3
    slot_count: int = 8
    slot_duration_s: float = 100e-6
    prc_timeout_s: float = 100e-3
    payload_bytes_total: int = 0
    frame_payload_bytes: int = 65536
    ack_policy: AckPolicy = AckPolicy.NONE
    # None derives loss from the link margin of each frame's MCS
    frame_loss_probability: Optional[float] = 0.0
    app_bursts: int = 1
    app_burst_gap_s: float = 0.0
    probes_enabled: bool = True
    probe_interval_s: Optional[float] = None
    max_retries: int = 3
    higher_layer_bytes: int = 0
    max_time_s: float = 1.0

    def __post_init__(self):
        if self.link.mcs is None:
            raise ValueError("session link needs an MCS")
        if self.payload_bytes_total < 0:
            raise ValueError("payload_bytes_total must be >= 0")
        if self.app_bursts < 1:
            raise ValueError("app_bursts must be >= 1")
        if self.frame_loss_probability is not None and not 0 <= self.frame_loss_probability <= 1:
            raise ValueError("frame_loss_probability must be in [0, 1]")
        self.mac_params()  # validates the MAC-level fields

    def mac_params(self) -> MacParams:
        return MacParams(
            mcs=self.link.mcs,
            channel=self.link.channel,
            sifs_s=self.sifs_s,
            beacon_period_s=self.beacon_period_s,
            slot_count=self.slot_count,
            slot_duration_s=self.slot_duration_s,
            prc_timeout_s=self.prc_timeout_s,
            frame_payload_bytes=self.frame_payload_bytes,
            ack_policy=self.ack_policy,
            probes_enabled=self.probes_enabled,
            probe_interval_s=self.probe_interval_s,
            max_retries=self.max_retries,
            higher_layer_bytes=self.higher_layer_bytes,
        )


@dataclass
class TraceEntry:
    time_s: float
    sender: str
    frame_type: FrameType
    bits: int
    airtime_s: float
    delivered: bool
    app_bytes: int = 0
    seq: int = 0
    queue_bytes: int = 0  # PRDEV queue when the frame went out

    @property
    def end_s(self) -> float:
        return self.time_s + self.airtime_s


@dataclass
class SessionTrace:
    entries: list[TraceEntry]
    phy_rate_gbps: float
    delivered_bytes: int = 0
    associations: int = 0
    association_latency_s: Optional[float] = None
    completion_time_s: Optional[float] = None
    data_start_s: Optional[float] = None
    data_end_s: Optional[float] = None
    final_prc_phase: PrcPhase = PrcPhase.PSP_BEACONING
    final_prdev_phase: PrdevPhase = PrdevPhase.SCANNING
    end_time_s: float = 0.0

    @property
    def goodput_gbps(self) -> float:
        if self.data_start_s is None or self.data_end_s is None or self.data_end_s <= self.data_start_s:
            return 0.0
        return self.delivered_bytes * 8 / (self.data_end_s - self.data_start_s) / 1e9

    @property
    def overhead_fraction(self) -> float:
        return 1 - self.goodput_gbps / self.phy_rate_gbps if self.goodput_gbps else 1.0

    def frame_types(self, delivered_only: bool = False) -> list[FrameType]:
        return [e.frame_type for e in self.entries if e.delivered or not delivered_only]

    def to_csv(self) -> str:
        lines = ["time_s,sender,frame_type,bits,delivered"]
        for e in self.entries:
            lines.append(f"{e.time_s:.12f},{e.sender},{e.frame_type.name},{e.bits},{int(e.delivered)}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict[str, str]:
        def fmt(v, places):
            return "n/a" if v is None else f"{v:.{places}f}"

        return {
            "association_latency_s": fmt(self.association_latency_s, 9),
            "associations": str(self.associations),
            "delivered_bytes": str(self.delivered_bytes),
            "completion_time_s": fmt(self.completion_time_s, 9),
            "goodput_gbps": f"{self.goodput_gbps:.2f}",
            "phy_rate_gbps": f"{self.phy_rate_gbps:.2f}",
            "overhead_fraction": f"{self.overhead_fraction:.4f}",
            "frames": str(len(self.entries)),
        }


def _loss_model(config: SessionConfig):
    if config.frame_loss_probability is not None:
        prob = config.frame_loss_probability
        return lambda mcs: prob
    cache = {}

    def by_margin(mcs: Mcs) -> float:
        if mcs not in cache:
            cache[mcs] = 0.0 if link_feasible(config.link.with_mcs(mcs)).feasible else 1.0
        return cache[mcs]

    return by_margin


def simulate_session(config: SessionConfig, seed: int = 0) -> SessionTrace:
    """Run one pairnet session from the first beacon to the PRC's return to beaconing."""
    params = config.mac_params()
    rng = random.Random(seed)
    loss = _loss_model(config)
    prc = PrcState(params, beacon_due=0.0)
    prdev = PrdevState(params)
    trace = SessionTrace([], float(data_rate(params.mcs, params.channel)))

    heap: list = []
    counter = 0

    def push(t: float, node: str, event: SimEvent, entry: Optional[TraceEntry] = None):
        nonlocal counter
        heapq.heappush(heap, (t, int(event.kind), counter, node, event, entry))
        counter += 1

    push(0.0, PRC, SimEvent(0.0, EventKind.TIMER_EXPIRY, timer="beacon"))
    total = config.payload_bytes_total
    per_burst = total // config.app_bursts
    for k in range(config.app_bursts):
        size = per_burst if k < config.app_bursts - 1 else total - per_burst * (config.app_bursts - 1)
        t = k * config.app_burst_gap_s
        push(t, PRDEV, SimEvent(t, EventKind.APP_DATA_READY, data_bytes=size, final=k == config.app_bursts - 1))

    on_air: list[TraceEntry] = []
    last_new_seq: Optional[int] = None
    finished_at: Optional[float] = None
    done = False

    def record(sender: str, action: Transmit, queue_bytes: int) -> TraceEntry:
        frame = action.frame
        air = params.airtime(frame)
        lost = rng.random() < loss(frame.mcs)
        entry = TraceEntry(
            action.start_s,
            sender,
            frame.mac_header.frame_type,
            frame_bit_length(frame),
            air,
            not lost,
            action.app_bytes,
            frame.mac_header.seq_num,
            queue_bytes,
        )
        # half-duplex shared medium: overlapping transmissions destroy each other
        on_air[:] = [e for e in on_air if e.end_s > action.start_s]
        for other in on_air:
            if other.time_s < entry.end_s:
                other.delivered = False
                entry.delivered = False
        on_air.append(entry)
        trace.entries.append(entry)
        return entry

    while heap and not done:
        t, _, _, node, event, entry = heapq.heappop(heap)
        if t > config.max_time_s:
            break
        if entry is not None and not entry.delivered:
            continue
        trace.end_time_s = t
        if node == PRC:
            if event.kind is EventKind.FRAME_ARRIVAL and event.frame.mac_header.frame_type is FrameType.DATA:
                seq = event.frame.mac_header.seq_num
                if seq != last_new_seq:
                    last_new_seq = seq
                    trace.delivered_bytes += entry.app_bytes
                    if entry.app_bytes:
                        trace.completion_time_s = t
                if trace.data_start_s is None:
                    trace.data_start_s = entry.time_s
                trace.data_end_s = t + params.sifs_s
            prc, actions = prc_step(prc, event)
        else:
            before = prdev.phase
            prdev, actions = prdev_step(prdev, event)
            if before is not PrdevPhase.PAP_ACTIVE and prdev.phase is PrdevPhase.PAP_ACTIVE:
                trace.associations += 1
                if trace.association_latency_s is None:
                    trace.association_latency_s = t

        peer = PRDEV if node == PRC else PRC
        for action in actions:
            if isinstance(action, SetTimer):
                push(action.at_s, node, SimEvent(action.at_s, EventKind.TIMER_EXPIRY, timer=action.name))
                continue
            queue = prdev.pending_payload_bytes if node == PRDEV else 0
            rec = record(node, action, queue)
            ftype = rec.frame_type
            if node == PRDEV and ftype is FrameType.DISASSOC_REQ:
                finished_at = action.start_s
                if trace.data_start_s is not None:
                    trace.data_end_s = action.start_s
            if node == PRC and ftype is FrameType.BEACON and finished_at is not None:
                done = True
            if rec.delivered:
                arrival = rec.end_s
                push(arrival, peer, SimEvent(arrival, EventKind.FRAME_ARRIVAL, frame=action.frame), rec)

    trace.entries.sort(key=lambda e: e.time_s)
    trace.final_prc_phase = prc.phase
    trace.final_prdev_phase = prdev.phase
    return trace


def net_throughput_gbps(
    phy_rate: Optional[float],
    frame_payload_bytes: int,
    ack_policy: AckPolicy,
    sifs_s: float,
    mcs: Mcs,
    channel: ChannelDescriptor,
) -> float:
    """Closed-form steady-state goodput of back-to-back DATA frames."""
    rate = Fraction(data_rate(mcs, channel)) if phy_rate is None else Fraction(phy_rate)
    rs = symbol_rate(channel) * 10**9
    overhead = (Preamble.SHORT.symbols + Fraction(header_air_bits(mcs.mode), mcs.bits_per_symbol)) / rs
    payload_bits = 8 * frame_payload_bytes
    cycle = float(overhead + Fraction(payload_bits) / (rate * 10**9)) + sifs_s
    if ack_policy is AckPolicy.PER_FRAME:
        cycle += airtime_s(Preamble.SHORT, mcs.mode, MIN_FRAME_BYTES, control_mcs(mcs.mode), channel) + sifs_s
    return payload_bits / cycle / 1e9
