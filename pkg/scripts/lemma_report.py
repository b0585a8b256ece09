#!/usr/bin/env python3
"""Spot-check the variational inequality machinery and print worst cases.

Samples random exponent pairs for the scalar sign suite, then random
perturbed states for the key estimate Q/2 <= S(v) - S(phi), reporting
the tightest margins seen.

Usage: python scripts/lemma_report.py [--pairs 200] [--samples 100] [--seed 0]
"""

import argparse

import numpy as np

from dpnls.params import Params, PreconditionError
from dpnls.functionals import functionals
from dpnls.groundstate import solve_ground_state
from dpnls import lemma_lab


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    rows = lemma_lab.sign_suite(
        lemma_lab.sample_exponent_pairs(rng, args.pairs))
    print(f"sign suite over {len(rows)} exponent pairs:")
    print(f"  worst h_min  {min(r['h_min'] for r in rows):+.3e}")
    print(f"  worst g1_min {min(r['g1_min'] for r in rows):+.3e}")
    print(f"  worst g2_max {max(r['g2_max'] for r in rows):+.3e}")
    print(f"  worst g3_min {min(r['g3_min'] for r in rows):+.3e}")

    params = Params(1, 1.0, 1.0, 3.0, 7.0, 1.0)
    gs = solve_ground_state(params)
    kept, worst = 0, np.inf
    for prof in lemma_lab.perturbed_profiles(gs, rng, args.samples * 3):
        if kept >= args.samples:
            break
        rep = functionals(prof, params)
        try:
            chk = lemma_lab.key_estimate_check(rep, gs)
        except PreconditionError:
            continue
        kept += 1
        worst = min(worst, chk.margin)
    print(f"\nkey estimate over {kept} filtered states:")
    print(f"  worst margin {worst:+.3e} (nonnegative means the "
          f"inequality held)")


if __name__ == "__main__":
    main()
