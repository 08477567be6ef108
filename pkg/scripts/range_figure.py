#!/usr/bin/env python3
"""Range versus bandwidth for the four use-case profiles.

Writes the CSV (and a PNG when matplotlib is present) next to --out.

    python3 scripts/range_figure.py --out results/range.csv
"""

import argparse
import csv
import io
import sys
from pathlib import Path

from thz3d.scenario import run_range_figure


def plot(table: str, path: Path) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping plot", file=sys.stderr)
        return
    rows = list(csv.DictReader(io.StringIO(table)))
    fig, ax = plt.subplots(figsize=(6, 4))
    for profile in dict.fromkeys(r["profile"] for r in rows):
        pts = [(float(r["rate_gbps"]), float(r["range_m"])) for r in rows if r["profile"] == profile]
        ax.loglog(*zip(*pts), marker="o", label=profile)
    ax.axvline(100, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("data rate [Gbit/s]")
    ax.set_ylabel("range [m]")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="range.csv")
    ap.add_argument("--min-rate", type=float, default=100.0)
    args = ap.parse_args(argv)
    table, summary = run_range_figure(min_rate_gbps=args.min_rate)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(table)
    plot(table, out.with_suffix(".png"))
    sys.stdout.write(summary)


if __name__ == "__main__":
    main()
