"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line and
the session ends with a summary block."""

import time

import numpy as np
import pytest

from conftest import load_script
from thz3d.channel_plan import MULTIPLIERS, build_plan, channel_by_id, overlaps
from thz3d.frame import (
    CodecError,
    EH_CODE_BITS,
    EhFailure,
    Frame,
    FrameType,
    MacHeader,
    TAG_BITS,
    decode_frame,
    encode_frame,
    header_air_bits,
)
from thz3d.mac import AckPolicy, SessionConfig, simulate_session
from thz3d.phy import (
    PROFILES,
    Mcs,
    PhyMode,
    all_mcs,
    data_rate,
    max_range_m,
    required_snr_db,
    sensitivity_dbm,
)
from thz3d.channel_plan import smallest_channel
from thz3d.scenario import run_kiosk_download_demo

import mac_properties


@pytest.mark.criterion(1, "rate anchors")
def test_criterion_1_rate_anchors(criterion):
    cases = [
        ("OOK-RS", 1, 1.64),
        ("OOK-RS", 32, 52.56),
        ("64QAM-14/15", 32, 315.39),
    ]
    for name, m, expected in cases:
        rate = float(data_rate(Mcs.parse(name), smallest_channel(m)))
        criterion.check(abs(rate - expected) <= 0.01, f"{name} @ {m * 2.16:.2f} GHz = {rate:.4f} (want {expected})")
    criterion.done()


@pytest.mark.criterion(2, "sensitivity anchor")
def test_criterion_2_sensitivity(criterion):
    ch = smallest_channel(1)
    sc = sensitivity_dbm(Mcs.parse("BPSK-11/15"), ch.bandwidth_ghz, 8.0)
    ook = sensitivity_dbm(Mcs.parse("OOK-11/15"), ch.bandwidth_ghz, 8.0)
    criterion.check(abs(sc + 67.0) <= 0.1, f"BPSK-11/15 {sc:.3f} dBm")
    criterion.check(abs(ook + 67.0) <= 0.1, f"OOK-11/15 {ook:.3f} dBm")
    criterion.check(sc == ook, "SC and OOK identical")
    criterion.done()


@pytest.mark.criterion(3, "100 Gbit/s range reproduction and bandwidth monotonicity")
def test_criterion_3_ranges(criterion):
    t0 = time.perf_counter()
    targets = {"fronthaul_backhaul": 100.0, "data_center": 17.0, "kiosk": 0.61, "intra_device": 0.03}
    narrow = smallest_channel(1)
    for name, target in targets.items():
        profile = PROFILES[name]
        r100 = max_range_m(profile, min_rate_gbps=100.0)
        r_narrow = max_range_m(profile, channel=narrow)
        criterion.check(
            r100.feasible and abs(r100.distance_m - target) <= 0.3 * target,
            f"{name} {r100.distance_m:.4g} m vs {target} m",
        )
        criterion.check(r_narrow.distance_m > r100.distance_m, f"{name} 2.16 GHz {r_narrow.distance_m:.4g} m > 100G range")
    elapsed = time.perf_counter() - t0
    criterion.check(elapsed < 10, f"runtime {elapsed:.2f} s")
    criterion.done()


@pytest.mark.criterion(4, "kiosk 900 MB download")
def test_criterion_4_kiosk(criterion):
    t0 = time.perf_counter()
    report = run_kiosk_download_demo(payload_bytes=900_000_000)
    elapsed = time.perf_counter() - t0
    criterion.check(report.phy_rate_gbps >= 72, f"{report.mcs.name} on {report.channel.bandwidth_ghz:.2f} GHz = {report.phy_rate_gbps:.2f} Gbit/s")
    criterion.check(report.trace.delivered_bytes == 900_000_000, f"delivered {report.trace.delivered_bytes} bytes")
    done = report.completion_time_s
    criterion.check(done is not None and done <= 0.15, f"completion {done:.4f} s simulated")
    criterion.check(elapsed < 60, f"wall {elapsed:.2f} s")
    criterion.done()


def _random_frame(rng, mcs_list):
    mcs = mcs_list[rng.integers(len(mcs_list))]
    hdr = MacHeader(
        FrameType(int(rng.integers(7))),
        int(rng.integers(2)),
        int(rng.integers(1 << 16)),
        int(rng.integers(256)),
        int(rng.integers(256)),
        int(rng.integers(4096)),
    )
    size = int(rng.integers(2048, 2048 + 512))
    return Frame.build(mcs, hdr, rng.integers(0, 256, size, dtype=np.uint8).tobytes())


@pytest.mark.criterion(5, "codec round trips, SECDED correction and detection, no silent acceptance")
def test_criterion_5_codec(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    mcs_list = all_mcs()

    lossless = 0
    for _ in range(10_000):
        f = _random_frame(rng, mcs_list)
        lossless += decode_frame(encode_frame(f), f.mode) == f
    criterion.check(lossless == 10_000, f"{lossless}/10000 round trips lossless")

    corrected = 0
    for _ in range(10_000):
        f = _random_frame(rng, mcs_list)
        bits = encode_frame(f)
        bits[TAG_BITS + rng.integers(header_air_bits(f.mode))] ^= 1
        try:
            corrected += decode_frame(bits, f.mode) == f
        except CodecError:
            pass
    criterion.check(corrected == 10_000, f"{corrected}/10000 single-bit header errors corrected")

    flagged = 0
    for _ in range(10_000):
        f = _random_frame(rng, mcs_list)
        bits = encode_frame(f)
        word = rng.integers(header_air_bits(f.mode) // EH_CODE_BITS)
        pos = TAG_BITS + word * EH_CODE_BITS + rng.choice(EH_CODE_BITS, 2, replace=False)
        bits[pos] ^= 1
        try:
            decode_frame(bits, f.mode)
        except EhFailure:
            flagged += 1
    criterion.check(flagged == 10_000, f"{flagged}/10000 same-codeword double errors flagged")

    silent = rejected = 0
    for _ in range(100_000):
        f = _random_frame(rng, mcs_list)
        bits = encode_frame(f)
        k = int(rng.integers(3, 9))
        bits[TAG_BITS + rng.choice(header_air_bits(f.mode), k, replace=False)] ^= 1
        try:
            got = decode_frame(bits, f.mode)
        except CodecError:
            rejected += 1
            continue
        silent += got != f
    criterion.check(silent == 0, f"{silent} silent acceptances in 100000 trials of 3-8 bit errors ({rejected} rejected)")
    elapsed = time.perf_counter() - t0
    criterion.check(elapsed < 60, f"runtime {elapsed:.1f} s")
    criterion.done()


@pytest.mark.criterion(6, "MAC trace conformance and property suite")
def test_criterion_6_mac(criterion):
    link = PROFILES["kiosk"].link(channel_by_id(62), 0.3, Mcs.parse("64QAM-14/15"))

    trace = simulate_session(SessionConfig(link, payload_bytes_total=5 * 65536, frame_payload_bytes=65536), seed=1)
    seq = mac_properties.sequence(trace)
    criterion.check(mac_properties.matches_handshake(trace), f"lossless sequence {seq}")
    criterion.check(all(e.delivered for e in trace.entries), "every frame delivered")
    criterion.check(trace.final_prc_phase.name == "PSP_BEACONING" and trace.final_prdev_phase.name == "SCANNING", "final states")

    timeout = mac_properties.timeout_session(link)
    criterion.check(timeout.prc_returned_to_beaconing, f"PRC timeout returns to beaconing ({timeout.detail})")

    probe = mac_properties.probe_session(link)
    criterion.check(probe.probe_on_empty_queue, f"Probe Request on empty queue ({probe.detail})")

    t0 = time.perf_counter()
    report = mac_properties.property_sweep(1000, seed=6)
    criterion.check(report.goodput_violations == 0, f"goodput <= PHY rate over {report.runs} configs")
    criterion.check(report.sifs_violations == 0, f"SIFS spacing respected over {report.runs} configs")
    criterion.check(report.handshake_failures == 0, "lossless single-burst configs follow the handshake")
    criterion.check(report.nondeterministic == 0, f"identical traces under fixed seed over {report.runs} configs")
    criterion.check(True, f"sweep {time.perf_counter() - t0:.1f} s")
    criterion.done()


@pytest.mark.criterion(7, "Monte-Carlo oracle regenerates the threshold table within 0.2 dB")
def test_criterion_7_oracle(criterion):
    oracle = load_script("ber_oracle")
    t0 = time.perf_counter()
    table = oracle.regenerate(symbols=10_000_000, seed=7)
    regenerated = oracle.calibrated(table)
    worst = 0.0
    for mcs in all_mcs():
        shipped = required_snr_db(mcs)
        delta = abs(regenerated[mcs.name] - shipped)
        worst = max(worst, delta)
        criterion.check(delta <= 0.2, f"{mcs.name} oracle {regenerated[mcs.name]:.3f} vs {shipped:.3f} dB")
    criterion.check(True, f"worst {worst:.3f} dB, {time.perf_counter() - t0:.0f} s at 1e7 symbols")
    criterion.done()


@pytest.mark.criterion(8, "channel plan")
def test_criterion_8_channel_plan(criterion):
    plan = build_plan()
    criterion.check(len(plan) == 69, f"{len(plan)} channels")
    criterion.check(sorted({c.multiplier for c in plan}) == list(MULTIPLIERS), "8 bandwidth classes")
    c41 = channel_by_id(41)
    criterion.check(c41.bandwidth_cghz == 432, f"channel 41 bandwidth {c41.bandwidth_ghz} GHz")
    c69 = channel_by_id(69)
    criterion.check((c69.low_cghz, c69.high_cghz) == (25272, 32184), f"channel 69 spans {c69.low_cghz / 100}-{c69.high_cghz / 100} GHz")
    clashes = [
        (a.id, b.id)
        for a in plan
        for b in plan
        if a.id < b.id and a.multiplier == b.multiplier and overlaps(a, b)
    ]
    criterion.check(not clashes, f"no overlap inside a bandwidth class ({len(clashes)} clashes)")
    criterion.done()
