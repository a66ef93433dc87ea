#!/usr/bin/env python3
"""Regenerate the pinned Monte Carlo oracle constants.

Writes tests/fixtures/oracle_pins.json with the recorded per-scenario seeds.
The committed file was produced by exactly this script; rerunning it must
reproduce it bit for bit.
"""

import argparse
import json
from pathlib import Path

from signshape import pin_fixtures

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "oracle_pins.json"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--draws", type=int, default=10_000_000)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = parser.parse_args()
    fixtures = pin_fixtures(draws=args.draws)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(fixtures, handle, indent=2)
        handle.write("\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
