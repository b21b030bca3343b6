#!/usr/bin/env python3
"""Build the technology decision map from the measured-experiment fixture."""
import argparse
import os

from smisim import PAPER_EXPERIMENTS, build_map, emit_map


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="smisim-out/map")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)

    data = build_map(list(PAPER_EXPERIMENTS))
    for fmt in ("csv", "svg"):
        path = os.path.join(args.out, f"decision_map.{fmt}")
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(emit_map(data, fmt))
        print(f"wrote {path}")

    width = max(len(p.name) for p in data.points)
    for p in data.points:
        flag = " (baseline estimated)" if p.baseline_estimated else ""
        print(f"{p.name:<{width}}  ANL {p.anl_db:5.1f} dB  "
              f"diff {p.diff_db:+6.1f} dB  -> {p.winner.value}{flag}")


if __name__ == "__main__":
    main()
