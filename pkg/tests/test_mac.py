from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mac_properties import matches_handshake, sequence, sifs_violations
from thz3d.channel_plan import channel_by_id
from thz3d.frame import MIN_FRAME_BYTES, FrameType, Preamble, header_air_bits
from thz3d.mac import (
    AckPolicy,
    EventKind,
    MacParams,
    PrcPhase,
    PrcState,
    PrdevPhase,
    PrdevState,
    SessionConfig,
    SetTimer,
    SimEvent,
    Transmit,
    beacon_frame,
    net_throughput_gbps,
    parse_beacon,
    prc_step,
    prdev_step,
    simulate_session,
    _frame,
)
from thz3d.phy import PROFILES, LinkConfig, Mcs, all_mcs, data_rate

CH = channel_by_id(62)
MCS = Mcs.parse("64QAM-14/15")
LINK = PROFILES["kiosk"].link(CH, 0.3, MCS)
P = MacParams(MCS, CH)


def timer(t, name):
    return SimEvent(t, EventKind.TIMER_EXPIRY, timer=name)


def arrival(t, frame):
    return SimEvent(t, EventKind.FRAME_ARRIVAL, frame=frame)


def frame_from_prdev(ftype, seq=0, ack=0):
    return _frame(P, ftype, P.prdev_id, P.prc_id, seq, bytes(MIN_FRAME_BYTES), mcs=MCS if ftype is FrameType.DATA else None, ack=ack)


def frame_from_prc(ftype, seq=0):
    return _frame(P, ftype, P.prc_id, P.prdev_id, seq, bytes(MIN_FRAME_BYTES))


def transmits(actions):
    return [a for a in actions if isinstance(a, Transmit)]


def timers(actions):
    return [a for a in actions if isinstance(a, SetTimer)]


class TestPrc:
    def test_beacon_timer_emits_beacon_and_reschedules(self):
        state, actions = prc_step(PrcState(P, beacon_due=0.0), timer(0.0, "beacon"))
        (tx,) = transmits(actions)
        assert tx.frame.mac_header.frame_type is FrameType.BEACON and tx.start_s == 0.0
        assert timers(actions) == [SetTimer("beacon", P.beacon_period_s)]
        assert state.phase is PrcPhase.PSP_BEACONING and state.timeout_deadline is None

    def test_stale_beacon_timer_ignored(self):
        state = PrcState(P, beacon_due=5e-3)
        assert prc_step(state, timer(1e-3, "beacon")) == (state, [])

    def _after_beacon(self):
        state, actions = prc_step(PrcState(P, beacon_due=0.0), timer(0.0, "beacon"))
        return state, P.airtime(transmits(actions)[0].frame)

    def test_assoc_req_in_slot_accepted(self):
        state, beacon_air = self._after_beacon()
        req = frame_from_prdev(FrameType.ASSOC_REQ)
        start = beacon_air + P.sifs_s
        end = start + P.airtime(req)
        state, actions = prc_step(state, arrival(end, req))
        (rsp,) = transmits(actions)
        assert rsp.frame.mac_header.frame_type is FrameType.ASSOC_RSP
        assert rsp.start_s == pytest.approx(end + P.sifs_s)
        assert state.phase is PrcPhase.AWAIT_FIRST_DATA
        assert state.beacon_due is None  # beacons stop
        assert state.timeout_deadline == pytest.approx(rsp.start_s + P.airtime(rsp.frame) + P.prc_timeout_s)

    def test_assoc_req_outside_slots_ignored(self):
        state, beacon_air = self._after_beacon()
        req = frame_from_prdev(FrameType.ASSOC_REQ)
        late = beacon_air + P.sifs_s + P.slot_count * P.slot_duration_s + 1e-6
        assert prc_step(state, arrival(late + P.airtime(req), req)) == (state, [])

    def test_data_in_psp_ignored(self):
        state, _ = self._after_beacon()
        assert prc_step(state, arrival(1e-3, frame_from_prdev(FrameType.DATA))) == (state, [])

    def test_timeout_returns_to_psp_without_frame(self):
        state = PrcState(P, phase=PrcPhase.PAP_ACTIVE, timeout_deadline=0.2)
        new, actions = prc_step(state, timer(0.2, "timeout"))
        assert new.phase is PrcPhase.PSP_BEACONING and new.timeout_deadline is None
        assert not transmits(actions) and timers(actions) == [SetTimer("beacon", 0.2)]

    def test_refreshed_timeout_makes_old_timer_stale(self):
        state = PrcState(P, phase=PrcPhase.PAP_ACTIVE, timeout_deadline=0.2)
        state, actions = prc_step(state, arrival(0.15, frame_from_prdev(FrameType.PROBE_REQ)))
        assert state.timeout_deadline == pytest.approx(0.15 + P.prc_timeout_s)
        assert prc_step(state, timer(0.2, "timeout"))[0].phase is PrcPhase.PAP_ACTIVE

    @pytest.mark.parametrize("ftype", [FrameType.DATA, FrameType.PROBE_REQ])
    def test_any_prdev_frame_refreshes(self, ftype):
        state = PrcState(P, phase=PrcPhase.AWAIT_FIRST_DATA, timeout_deadline=0.1)
        state, _ = prc_step(state, arrival(0.05, frame_from_prdev(ftype)))
        assert state.timeout_deadline == pytest.approx(0.05 + P.prc_timeout_s)
        assert state.phase is PrcPhase.PAP_ACTIVE

    def test_ack_sent_for_ack_requested_data(self):
        state = PrcState(P, phase=PrcPhase.PAP_ACTIVE, timeout_deadline=0.1)
        _, actions = prc_step(state, arrival(0.01, frame_from_prdev(FrameType.DATA, seq=17, ack=1)))
        (ack,) = transmits(actions)
        assert ack.frame.mac_header.frame_type is FrameType.ACK and ack.frame.mac_header.seq_num == 17
        assert ack.start_s == pytest.approx(0.01 + P.sifs_s)
        assert ack.frame.mcs == P.control_mcs

    def test_disassoc_returns_to_beaconing(self):
        state = PrcState(P, phase=PrcPhase.PAP_ACTIVE, timeout_deadline=0.1)
        state, actions = prc_step(state, arrival(0.02, frame_from_prdev(FrameType.DISASSOC_REQ)))
        assert state.phase is PrcPhase.PSP_BEACONING and state.timeout_deadline is None
        assert timers(actions) == [SetTimer("beacon", pytest.approx(0.02 + P.sifs_s))]


class TestPrdev:
    def test_beacon_triggers_assoc_req_at_first_slot(self):
        beacon = beacon_frame(P, 0)
        end = P.airtime(beacon)
        state, actions = prdev_step(PrdevState(P), arrival(end, beacon))
        (req,) = transmits(actions)
        assert req.frame.mac_header.frame_type is FrameType.ASSOC_REQ
        assert req.start_s == pytest.approx(end + P.sifs_s)
        assert state.phase is PrdevPhase.AWAIT_ASSOC_RSP

    def test_assoc_rsp_in_scanning_ignored(self):
        state = PrdevState(P)
        assert prdev_step(state, arrival(1e-3, frame_from_prc(FrameType.ASSOC_RSP))) == (state, [])

    def test_assoc_rsp_then_first_data(self):
        state = PrdevState(P, phase=PrdevPhase.AWAIT_ASSOC_RSP, pending_payload_bytes=10_000)
        state, actions = prdev_step(state, arrival(1e-3, frame_from_prc(FrameType.ASSOC_RSP)))
        assert state.phase is PrdevPhase.PAP_ACTIVE
        (t,) = timers(actions)
        state, actions = prdev_step(state, timer(t.at_s, "tx"))
        (data,) = transmits(actions)
        assert data.frame.mac_header.frame_type is FrameType.DATA and data.app_bytes == 10_000
        assert data.start_s == pytest.approx(1e-3 + P.sifs_s)

    def test_app_complete_sends_disassoc(self):
        state = PrdevState(P, phase=PrdevPhase.PAP_ACTIVE, app_complete=True, tx_due=0.01)
        state, actions = prdev_step(state, timer(0.01, "tx"))
        (bye,) = transmits(actions)
        assert bye.frame.mac_header.frame_type is FrameType.DISASSOC_REQ
        assert state.finished and state.phase is PrdevPhase.SCANNING

    def test_empty_queue_schedules_probe(self):
        state = PrdevState(P, phase=PrdevPhase.PAP_ACTIVE, tx_due=0.01, last_tx_end=0.009)
        state, actions = prdev_step(state, timer(0.01, "tx"))
        (t,) = timers(actions)
        assert t.name == "probe" and t.at_s == pytest.approx(0.009 + P.probe_every_s)
        assert t.at_s < 0.009 + P.prc_timeout_s
        state, actions = prdev_step(state, timer(t.at_s, "probe"))
        (probe,) = transmits(actions)
        assert probe.frame.mac_header.frame_type is FrameType.PROBE_REQ

    def test_new_data_cancels_probe(self):
        state = PrdevState(P, phase=PrdevPhase.PAP_ACTIVE, probe_due=0.05, last_tx_end=0.0)
        state, actions = prdev_step(state, SimEvent(0.01, EventKind.APP_DATA_READY, data_bytes=4096))
        assert transmits(actions)[0].frame.mac_header.frame_type is FrameType.DATA
        assert prdev_step(state, timer(0.05, "probe"))[1] == []

    def test_finished_prdev_ignores_beacons(self):
        state = PrdevState(P, finished=True)
        assert prdev_step(state, arrival(1.0, beacon_frame(P, 3))) == (state, [])

    def test_lost_ack_retransmits_same_seq(self):
        p = MacParams(MCS, CH, ack_policy=AckPolicy.PER_FRAME)
        state = PrdevState(p, phase=PrdevPhase.PAP_ACTIVE, pending_payload_bytes=5000, tx_due=0.0)
        state, actions = prdev_step(state, timer(0.0, "tx"))
        first = transmits(actions)[0]
        (ack_timer,) = timers(actions)
        state, actions = prdev_step(state, timer(ack_timer.at_s, "ack"))
        again = transmits(actions)[0]
        assert again.frame.mac_header.seq_num == first.frame.mac_header.seq_num
        assert state.retries == 1 and state.pending_payload_bytes == 5000


def test_beacon_body_round_trip():
    info = parse_beacon(beacon_frame(P, 0))
    assert info == {
        "slot_count": P.slot_count,
        "slot_duration_s": pytest.approx(P.slot_duration_s),
        "beacon_period_s": pytest.approx(P.beacon_period_s),
        "prc_timeout_s": pytest.approx(P.prc_timeout_s),
    }


class TestSession:
    def test_lossless_sequence(self):
        trace = simulate_session(SessionConfig(LINK, payload_bytes_total=3 * 65536), seed=0)
        assert sequence(trace) == "BEACON ASSOC_REQ ASSOC_RSP DATA DATA DATA DISASSOC_REQ BEACON"
        assert matches_handshake(trace)
        assert trace.associations == 1 and trace.delivered_bytes == 3 * 65536
        assert (trace.final_prc_phase, trace.final_prdev_phase) == (PrcPhase.PSP_BEACONING, PrdevPhase.SCANNING)

    def test_total_loss_gives_beacons_only(self):
        trace = simulate_session(SessionConfig(LINK, payload_bytes_total=65536, frame_loss_probability=1.0, max_time_s=0.045), 0)
        assert set(trace.frame_types()) == {FrameType.BEACON}
        assert not any(e.delivered for e in trace.entries)
        assert trace.association_latency_s is None
        assert len(trace.entries) == 5  # t = 0, 10, 20, 30, 40 ms

    def test_infeasible_link_from_margin(self):
        far = PROFILES["kiosk"].link(CH, 500.0, MCS)
        trace = simulate_session(SessionConfig(far, payload_bytes_total=65536, frame_loss_probability=None, max_time_s=0.03), 0)
        assert set(trace.frame_types()) == {FrameType.BEACON} and not any(e.delivered for e in trace.entries)

    def test_one_frame_payload(self):
        trace = simulate_session(SessionConfig(LINK, payload_bytes_total=65536, frame_payload_bytes=65536), 0)
        types = trace.frame_types()
        assert types.count(FrameType.DATA) == 1
        assert types[types.index(FrameType.DATA) + 1] is FrameType.DISASSOC_REQ

    def test_zero_payload(self):
        trace = simulate_session(SessionConfig(LINK, payload_bytes_total=0), 0)
        assert sequence(trace) == "BEACON ASSOC_REQ ASSOC_RSP DISASSOC_REQ BEACON"

    def test_short_last_frame_padded(self):
        trace = simulate_session(SessionConfig(LINK, payload_bytes_total=65536 + 100, frame_payload_bytes=65536), 0)
        data = [e for e in trace.entries if e.frame_type is FrameType.DATA]
        assert [d.app_bytes for d in data] == [65536, 100]
        assert data[1].bits == 8 + header_air_bits(MCS.mode) + 8 * MIN_FRAME_BYTES

    def test_association_latency(self):
        trace = simulate_session(SessionConfig(LINK), 0)
        beacon, req, rsp = trace.entries[:3]
        assert req.time_s == pytest.approx(beacon.end_s + 1e-6)
        assert rsp.time_s == pytest.approx(req.end_s + 1e-6)
        assert trace.association_latency_s == pytest.approx(rsp.end_s)

    def test_retransmissions_recover_losses(self):
        cfg = SessionConfig(
            LINK, payload_bytes_total=40 * 4096, frame_payload_bytes=4096, ack_policy=AckPolicy.PER_FRAME,
            frame_loss_probability=0.2, max_retries=40,
        )
        trace = simulate_session(cfg, seed=11)
        assert trace.delivered_bytes == 40 * 4096
        assert trace.frame_types().count(FrameType.DATA) > 40

    def test_same_seed_same_trace(self):
        cfg = SessionConfig(LINK, payload_bytes_total=30 * 4096, frame_payload_bytes=4096, frame_loss_probability=0.3)
        assert simulate_session(cfg, 5).to_csv() == simulate_session(cfg, 5).to_csv()

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            SessionConfig(LINK, frame_payload_bytes=2047)
        with pytest.raises(ValueError):
            SessionConfig(LINK, frame_payload_bytes=2_099_201)
        with pytest.raises(ValueError):
            SessionConfig(LINK, slot_count=0)
        with pytest.raises(ValueError):
            SessionConfig(LinkConfig(0, 0, 0, 1.0, CH))  # no MCS

    def test_csv_columns(self):
        lines = simulate_session(SessionConfig(LINK), 0).to_csv().splitlines()
        assert lines[0] == "time_s,sender,frame_type,bits,delivered"
        assert lines[1].split(",")[1:] == ["PRC", "BEACON", str(8 + 144 + 8 * 2048), "1"]


class TestThroughput:
    @pytest.mark.parametrize("ack", list(AckPolicy))
    @pytest.mark.parametrize("frame_bytes", [2048, 65536, 2_099_200])
    def test_matches_simulation(self, ack, frame_bytes):
        n = max(10, 4_000_000 // frame_bytes)
        trace = simulate_session(SessionConfig(LINK, payload_bytes_total=n * frame_bytes, frame_payload_bytes=frame_bytes, ack_policy=ack), 0)
        closed = net_throughput_gbps(None, frame_bytes, ack, 1e-6, MCS, CH)
        assert trace.goodput_gbps == pytest.approx(closed, rel=0.01)

    def test_limit_without_sifs(self):
        # overhead is preamble and header symbols only
        rate = data_rate(MCS, CH)
        payload_bits = 8 * 2_099_200
        payload_symbols = Fraction(payload_bits) / (MCS.bits_per_symbol * MCS.code_rate)
        overhead_symbols = Preamble.SHORT.symbols + Fraction(144, MCS.bits_per_symbol)
        expected = float(rate * payload_symbols / (payload_symbols + overhead_symbols))
        assert net_throughput_gbps(None, 2_099_200, AckPolicy.NONE, 0.0, MCS, CH) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(
        st.sampled_from(all_mcs()),
        st.integers(1, 69),
        st.integers(2048, 2_099_200),
        st.floats(0, 1e-5),
    )
    def test_ack_costs_throughput(self, mcs, ch_id, frame_bytes, sifs):
        ch = channel_by_id(ch_id)
        none = net_throughput_gbps(None, frame_bytes, AckPolicy.NONE, sifs, mcs, ch)
        per = net_throughput_gbps(None, frame_bytes, AckPolicy.PER_FRAME, sifs, mcs, ch)
        assert per < none < float(data_rate(mcs, ch))


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(all_mcs()),
    st.integers(1, 69),
    st.integers(0, 400_000),
    st.integers(2048, 100_000),
    st.sampled_from(list(AckPolicy)),
    st.floats(0, 0.4),
    st.integers(0, 2**32 - 1),
)
def test_session_invariants(mcs, ch_id, total, frame_bytes, ack, loss, seed):
    link = PROFILES["kiosk"].link(channel_by_id(ch_id), 0.3, mcs)
    cfg = SessionConfig(link, payload_bytes_total=total, frame_payload_bytes=frame_bytes, ack_policy=ack, frame_loss_probability=loss, max_time_s=0.3)
    trace = simulate_session(cfg, seed)
    assert trace.goodput_gbps <= trace.phy_rate_gbps
    assert trace.delivered_bytes <= total
    assert not sifs_violations(trace, cfg.sifs_s)
    times = [e.time_s for e in trace.entries]
    assert times == sorted(times)
    types = trace.frame_types()
    if FrameType.DATA in types:
        first = types.index(FrameType.DATA)
        assert FrameType.ASSOC_RSP in types[:first]
        assert trace.entries[first].sender == "PRDEV"
    if loss == 0:
        assert trace.associations == 1 and trace.delivered_bytes == total
