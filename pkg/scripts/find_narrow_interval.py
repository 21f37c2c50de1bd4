"""Widen K = [a, a + w] for a family until the verification cost nears a cap.

The cost is the planner's count of scheduled orbit-coefficient operations.
Prints the widest width found (by bisection) whose plan stays within the cap,
and optionally writes a ready-to-run config.

    python3 scripts/find_narrow_interval.py --a 1.0 --ops-cap 1e7 --write configs/narrow_ratio_power.json
"""

import argparse
import json

from ufhc.constructor import plan
from ufhc.errors import BudgetExceeded
from ufhc.sequence_space import OpenBall, SparseVector
from ufhc.weight_families import CompactInterval, RatioPower


def cost(a, width, U, V, p, cap):
    try:
        pl = plan(RatioPower(), CompactInterval(a, a + width), p, U, V, 1, cap=cap)
    except BudgetExceeded:
        return None
    return pl


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--ops-cap", type=float, default=1e7)
    ap.add_argument("--cap", type=int, default=10**6)
    ap.add_argument("--digits", type=int, default=4, help="round the width down to this many decimals")
    ap.add_argument("--write", help="write a config with the chosen K")
    args = ap.parse_args()

    U = OpenBall(SparseVector.zero(), 1.0)
    V = OpenBall(SparseVector.basis(0, 1.0), 0.5)

    def fits(w):
        pl = cost(args.a, w, U, V, args.p, args.cap)
        return pl is not None and pl.budget.coefficient_ops <= args.ops_cap

    lo, hi = 0.0, 1e-3
    while fits(hi):
        lo, hi = hi, 2 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if fits(mid):
            lo = mid
        else:
            hi = mid
    width = int(lo * 10**args.digits) / 10**args.digits
    pl = cost(args.a, width, U, V, args.p, args.cap)
    print(f"K = [{args.a}, {args.a + width}]  (bisection edge {lo:.10g})")
    print(f"tau = {pl.tau}, l = {list(pl.l_schedule)}, s0 = {pl.s0}, c = {pl.c}")
    print(f"budget: {json.dumps(pl.budget.to_json())}")
    if args.write:
        cfg = {
            "family": {"kind": "ratio_power"},
            "p": args.p,
            "K": [args.a, round(args.a + width, args.digits)],
            "U": {"center": [], "radius": 1.0},
            "V": {"center": [[0, 1.0]], "radius": 0.5},
            "M": 1,
            "grid_per_block": 20,
            "output_dir": "runs/narrow_ratio_power",
        }
        with open(args.write, "w") as fh:
            json.dump(cfg, fh, indent=2)
            fh.write("\n")


if __name__ == "__main__":
    main()
