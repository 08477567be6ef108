#!/usr/bin/env python3
"""900 MB kiosk download at several distances and frame sizes.

    python3 scripts/kiosk_demo.py
"""

from thz3d.mac import AckPolicy, SessionConfig, simulate_session
from thz3d.phy import PROFILES, RateUnattainable
from thz3d.scenario import kiosk_channel

PAYLOAD = 900_000_000


def main():
    print("distance_m,channel_id,mcs,phy_rate_gbps,frame_bytes,ack,completion_s,goodput_gbps")
    for distance in (0.3, 1.0, 2.0):
        try:
            ch, mcs = kiosk_channel(distance)
        except RateUnattainable:
            print(f"{distance},,,,,,,")
            continue
        link = PROFILES["kiosk"].link(ch, distance, mcs)
        for frame_bytes in (65_536, 2_099_200):
            for ack in AckPolicy:
                trace = simulate_session(
                    SessionConfig(link, payload_bytes_total=PAYLOAD, frame_payload_bytes=frame_bytes, ack_policy=ack)
                )
                print(
                    f"{distance},{ch.id},{mcs.name},{trace.phy_rate_gbps:.2f},{frame_bytes},{ack.name},"
                    f"{trace.completion_time_s:.6f},{trace.goodput_gbps:.2f}"
                )


if __name__ == "__main__":
    main()
