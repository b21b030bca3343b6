#!/usr/bin/env python3
"""Run the end-to-end bench validations and print a human-readable summary."""
import argparse
import sys

from smisim.cli import main as smisim_main


def run(out_dir: str) -> int:
    code = smisim_main(["validate", "--out", out_dir])
    print(f"\nvalidate exit code: {code}", file=sys.stderr)
    return code


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="smisim-out/validation")
    args = parser.parse_args()
    sys.exit(run(args.out))
