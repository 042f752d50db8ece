"""Scan the interior grid and compare the commutator condition and the
decoherence functional against the non-disturbance condition.

    python3 scripts/equivalence_scan.py [--n 21]
"""
import argparse
import math

import numpy as np

from pwfriend import (
    WignerFriendParams,
    build_wigner_friend,
    decoherence_functional,
    def3_commutator_residual,
    friend_events,
    nondisturbance_check,
    wigner_events,
    wigner_friend_family,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=21)
    args = ap.parse_args()
    theta = np.linspace(math.asin(0.05), math.pi / 2 - math.asin(0.05), args.n)
    phis = np.linspace(0, 2 * math.pi, args.n)
    comm_gap, nd_count, vanishing = 0.0, 0, 0
    nd_offdiag = []
    for ta in theta:
        for tal in theta:
            for phi in phis:
                p = WignerFriendParams(math.cos(ta), math.sin(ta), float(phi),
                                       math.cos(tal), math.sin(tal), 0.0)
                h = build_wigner_friend(p)
                fs, ws = friend_events(p).values(), list(wigner_events(p).values())
                comm = max(def3_commutator_residual(h, f, w) for f in fs for w in ws)
                # the residual never depends on a, b or phi
                comm_gap = max(comm_gap, abs(comm - p.alpha * p.beta))
                vanishing += comm < 1e-9
                if nondisturbance_check(p).satisfied:
                    nd_count += 1
                    d = decoherence_functional(wigner_friend_family(h, p), h)
                    nd_offdiag.append(d.max_off_diagonal)
    total = args.n**3
    print(f"grid points            : {total}")
    print(f"non-disturbance points : {nd_count}")
    print(f"commutator < 1e-9      : {vanishing}")
    print(f"max |commutator - alpha*beta| : {comm_gap:.2e}")
    if nd_offdiag:
        print(f"off-diagonal |D| at non-disturbance: min {min(nd_offdiag):.4f}, "
              f"max {max(nd_offdiag):.4f}")


if __name__ == "__main__":
    main()
