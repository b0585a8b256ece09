#!/usr/bin/env python3
"""Sweep omega, solve the ground state at each value, and print the
instability classification table.

Usage: python scripts/omega_sweep.py [--omegas 0.5 1 2 10] [--csv out.csv]
"""

import argparse
import csv

from dpnls.params import Params
from dpnls.groundstate import solve_ground_state
from dpnls.stability import classify


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--omegas", type=float, nargs="+",
                    default=[0.25, 0.5, 0.75, 1.0, 2.0, 5.0, 10.0])
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=3.0)
    ap.add_argument("--q", type=float, default=7.0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    rows = []
    print(f"{'omega':>8} {'amplitude':>12} {'S':>12} {'E':>12} "
          f"{'d2s':>12}  criterion")
    for w in args.omegas:
        params = Params(args.N, args.a, args.b, args.p, args.q, w)
        gs = solve_ground_state(params)
        rep = classify(gs)
        tag = "met" if rep.criterion_met else "not met"
        print(f"{w:8.3f} {gs.amplitude:12.6f} {gs.report.action:12.6f} "
              f"{rep.energy:12.6f} {rep.d2s:12.6f}  {tag}")
        rows.append({"omega": w, "amplitude": gs.amplitude,
                     "action": gs.report.action, "energy": rep.energy,
                     "d2s": rep.d2s, "criterion_met": rep.criterion_met})

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
