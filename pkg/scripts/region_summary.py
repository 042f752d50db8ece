"""Run a sweep spec and print how many grid points fall in each region.

    python3 scripts/region_summary.py scripts/inputs/region.txt [--jobs 4] [--csv out.csv]
"""
import argparse
from collections import Counter

from pwfriend.cli import load_spec
from pwfriend.sweep import FLAG_COLUMNS, run_sweep, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("spec")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--csv", help="also write the full CSV here")
    args = ap.parse_args()
    records = run_sweep(load_spec(args.spec), jobs=args.jobs)
    counts = Counter()
    for rec in records:
        counts.update(k for k in FLAG_COLUMNS if rec.flags[k])
    print(f"points: {len(records)}")
    for k in FLAG_COLUMNS:
        print(f"  {k:<24} {counts[k]}")
    nd_outside = sum(r.flags["nondisturbance"] and not r.flags["def2a_normalized"] for r in records)
    print(f"  non-disturbance outside Def2a-normalised: {nd_outside}")
    if args.csv:
        write_csv(records, args.csv)


if __name__ == "__main__":
    main()
