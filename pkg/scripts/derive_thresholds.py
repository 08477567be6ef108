#!/usr/bin/env python3
"""Recompute the pre-FEC Eb/N0 table shipped in thz3d.phy and show the drift.

    python3 scripts/derive_thresholds.py
"""

from thz3d.ber import derive_threshold_table
from thz3d.phy import PRE_FEC_EBN0_DB


def main():
    table = derive_threshold_table()
    print("modulation,target_ber,ebn0_db,shipped_db,delta_db")
    for (mod, target), value in table.items():
        shipped = PRE_FEC_EBN0_DB[(mod, target)]
        print(f"{mod.label},{target:g},{value:.3f},{shipped:.3f},{value - shipped:+.4f}")


if __name__ == "__main__":
    main()
