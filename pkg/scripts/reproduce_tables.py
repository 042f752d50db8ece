"""Evaluate the six closed-form tables and compare them with the operator rules.

    python3 scripts/reproduce_tables.py [--samples 200] [--seed 0]

Prints each table at a few named parameter points, then the worst
closed-form vs operator deviation over random parameter draws.
"""
import argparse
import math

import numpy as np

from pwfriend import WignerFriendParams, crosscheck, eval_table
from pwfriend.conditions import DegenerateParametersError
from pwfriend.tables import operator_tables

POINTS = {
    "generic": WignerFriendParams.from_amplitudes(0.6, 0.8, phi_S=0.7),
    "nondisturbance": WignerFriendParams.from_amplitudes(0.6, 0.6),
    "coincidence": WignerFriendParams(1 / math.sqrt(2), 1 / math.sqrt(2), math.pi / 2, 0.6, 0.8, 0.0),
}


def show(name: str, p: WignerFriendParams) -> None:
    print(f"== {name}: a={p.a:.4f} alpha={p.alpha:.4f} phi={p.phi:.4f}")
    for tid in ("T1", "T2", "T3", "T4", "T5", "T6"):
        try:
            cc = crosscheck(tid, p)
            t = eval_table(tid, p, cc.branch) if tid in ("T2", "T4") else eval_table(tid, p)
        except (ValueError, DegenerateParametersError) as exc:
            print(f"  {tid}: n/a ({exc})")
            continue
        print(f"  {tid} [{t.branch or '-'}] dev={cc.max_deviation:.2e}")
        for label, m in (("fwd", t.forward), ("rev", t.reversed)):
            if m is not None:
                print(f"    {label}: " + np.array2string(np.round(m, 6), separator=", ")
                      .replace("\n", "\n         "))


def random_sweep(samples: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(("T1", "T3", "T5", "T6"), 0.0)
    for _ in range(samples):
        ta, tal = rng.uniform(0.05, math.pi / 2 - 0.05, 2)
        p = WignerFriendParams(math.cos(ta), math.sin(ta), rng.uniform(-math.pi, math.pi),
                               math.cos(tal), math.sin(tal), 0.0)
        ops = operator_tables(p)
        for tid in worst:
            worst[tid] = max(worst[tid], crosscheck(tid, p, ops=ops).max_deviation)
    print(f"== {samples} random draws (seed {seed})")
    for tid, dev in worst.items():
        print(f"  {tid}: max |closed - operator| = {dev:.2e}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name, p in POINTS.items():
        show(name, p)
    random_sweep(args.samples, args.seed)


if __name__ == "__main__":
    main()
