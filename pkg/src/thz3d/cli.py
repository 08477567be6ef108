"""``thz3d`` command line."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from thz3d.channel_plan import DEFAULT_CHANNEL_ID, plan_csv
from thz3d.frame import CodecError, Frame, FrameType, MacHeader, read_frame_file, write_frame_file
from thz3d.mac import simulate_session
from thz3d.phy import PROFILES, InvalidMcs, Mcs, NoFeasibleMcs, PhyMode, RateUnattainable, data_rate, get_profile, max_range_m, truncate
from thz3d.scenario import (
    AUTO,
    Scenario,
    ScenarioError,
    load_scenario,
    parse_channels,
    parse_distances,
    parse_mcs,
    run_budget,
    run_conformance_vectors,
    run_kiosk_download_demo,
    run_range_figure,
    run_rate_table,
)

EXIT_VALIDATION = 2


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _scenario_from_flags(args) -> Scenario:
    if getattr(args, "scenario", None):
        sc = load_scenario(args.scenario)
    else:
        sc = Scenario(
            get_profile(args.profile or "kiosk"),
            parse_channels(args.channel or str(DEFAULT_CHANNEL_ID)),
            parse_mcs(args.mcs or AUTO),
            parse_distances(getattr(args, "distance", None) or "1.0"),
        )
    return sc


def cmd_plan(args) -> int:
    _emit(plan_csv(), args.out)
    return 0


def cmd_rates(args) -> int:
    _emit(run_rate_table(), args.out)
    return 0


def cmd_budget(args) -> int:
    _emit(run_budget(_scenario_from_flags(args)), args.out)
    return 0


def cmd_range(args) -> int:
    if args.channel is None and args.mcs is None:
        profiles = [args.profile] if args.profile else None
        if args.profile and args.profile not in PROFILES:
            raise ScenarioError(f"unknown profile {args.profile!r}")
        table, summary = run_range_figure(profiles, args.min_rate)
        _emit(table, args.out)
        sys.stderr.write(summary)
        return 0
    sc = _scenario_from_flags(args)
    rows = ["profile,channel_id,bandwidth_ghz,mcs,rate_gbps,range_m"]
    for ch in sc.channels:
        mcs = sc.profile.mcs if sc.mcs == AUTO else sc.mcs
        r = max_range_m(sc.profile, mcs=mcs, channel=ch)
        rows.append(f"{sc.profile.name},{ch.id},{ch.bandwidth_ghz:.2f},{mcs.name},{truncate(data_rate(mcs, ch))},{r.distance_m:.3f}")
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_mac_run(args) -> int:
    sc = load_scenario(args.scenario)
    seed = sc.seed if args.seed is None else args.seed
    trace = simulate_session(sc.session_config(), seed)
    _emit(trace.to_csv(), args.out or sc.out)
    for key, value in trace.summary().items():
        sys.stderr.write(f"{key}: {value}\n")
    return 0


def cmd_kiosk(args) -> int:
    report = run_kiosk_download_demo(
        payload_bytes=args.payload_bytes,
        distance_m=float(args.distance or 0.3),
        seed=args.seed or 0,
    )
    if args.out:
        Path(args.out).write_text(report.trace.to_csv(), encoding="utf-8")
    sys.stdout.write(report.text())
    return 0


def cmd_codec_encode(args) -> int:
    mcs = Mcs.parse(args.mcs or "BPSK-11/15")
    payload = Path(args.payload).read_bytes() if args.payload else bytes(2048)
    header = MacHeader(FrameType[args.frame_type.upper()], int(args.ack), args.pairnet, args.src, args.dest, args.seq)
    frame = Frame.build(mcs, header, payload)
    if not args.out:
        raise ScenarioError("codec encode needs --out")
    write_frame_file(args.out, frame)
    sys.stderr.write(f"wrote {args.out}: {mcs.name}, {len(payload)} payload bytes, hcs {frame.hcs:04x}\n")
    return 0


def cmd_codec_decode(args) -> int:
    frame = read_frame_file(args.file, PhyMode(args.mode.upper()))
    h = frame.mac_header
    info = (
        f"preamble: {frame.preamble.name}\nmcs: {frame.mcs.name}\nlength: {frame.phy_header.frame_length_bytes}\n"
        f"frame_type: {h.frame_type.name}\nack_policy: {h.ack_policy}\npairnet_id: {h.pairnet_id:#06x}\n"
        f"src_id: {h.src_id}\ndest_id: {h.dest_id}\nseq_num: {h.seq_num}\nhcs: {frame.hcs:04x}\n"
    )
    if args.out:
        Path(args.out).write_bytes(frame.payload)
    sys.stdout.write(info)
    return 0


def cmd_codec_vectors(args) -> int:
    _emit(run_conformance_vectors(), args.out)
    return 0


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    if "profile" in names:
        p.add_argument("--profile", choices=sorted(PROFILES))
    if "channel" in names:
        p.add_argument("--channel", help="id, list (1,33) or id range (1-32)")
    if "mcs" in names:
        p.add_argument("--mcs", help="e.g. 64QAM-14/15, OOK-RS, or auto")
    if "distance" in names:
        p.add_argument("--distance", help="metres: value, list, or start:stop:count")
    if "seed" in names:
        p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thz3d", description="sub-THz point-to-point link and MAC toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="channel plan")
    plan_sub = plan.add_subparsers(dest="action", required=True)
    dump = plan_sub.add_parser("dump", help="all channels as CSV")
    _common(dump)
    dump.set_defaults(func=cmd_plan)

    rates = sub.add_parser("rates", help="data rate of every MCS on every bandwidth")
    _common(rates)
    rates.set_defaults(func=cmd_rates)

    budget = sub.add_parser("budget", help="link budget at given distances")
    _common(budget, "profile", "channel", "mcs", "distance")
    budget.add_argument("--scenario", help="scenario file (overrides flags)")
    budget.set_defaults(func=cmd_budget)

    rng = sub.add_parser("range", help="maximum range per profile and bandwidth")
    _common(rng, "profile", "channel", "mcs")
    rng.add_argument("--min-rate", type=float, default=100.0, help="rate floor in Gbit/s for the anchor ranges")
    rng.set_defaults(func=cmd_range)

    mac = sub.add_parser("mac", help="MAC session simulation")
    mac_sub = mac.add_subparsers(dest="action", required=True)
    run = mac_sub.add_parser("run", help="simulate one session from a scenario file")
    run.add_argument("scenario")
    _common(run, "seed")
    run.set_defaults(func=cmd_mac_run)

    kiosk = sub.add_parser("kiosk-demo", help="900 MB kiosk download")
    _common(kiosk, "distance", "seed")
    kiosk.add_argument("--payload-bytes", type=int, default=900_000_000)
    kiosk.set_defaults(func=cmd_kiosk)

    codec = sub.add_parser("codec", help="frame files")
    codec_sub = codec.add_subparsers(dest="action", required=True)
    enc = codec_sub.add_parser("encode", help="build a frame file")
    _common(enc, "mcs")
    enc.add_argument("--payload", help="payload file (default 2048 zero bytes)")
    enc.add_argument("--frame-type", default="DATA", choices=[t.name for t in FrameType] + [t.name.lower() for t in FrameType])
    enc.add_argument("--ack", type=int, choices=(0, 1), default=0)
    enc.add_argument("--pairnet", type=lambda s: int(s, 0), default=0x3D01)
    enc.add_argument("--src", type=lambda s: int(s, 0), default=2)
    enc.add_argument("--dest", type=lambda s: int(s, 0), default=1)
    enc.add_argument("--seq", type=lambda s: int(s, 0), default=0)
    enc.set_defaults(func=cmd_codec_encode)
    dec = codec_sub.add_parser("decode", help="decode a frame file")
    dec.add_argument("file")
    dec.add_argument("--mode", default="SC", type=str.upper, choices=("SC", "OOK"))
    _common(dec)
    dec.set_defaults(func=cmd_codec_decode)
    vec = codec_sub.add_parser("vectors", help="conformance vectors as CSV")
    _common(vec)
    vec.set_defaults(func=cmd_codec_vectors)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, CodecError, InvalidMcs, RateUnattainable, NoFeasibleMcs, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"error: {msg}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
