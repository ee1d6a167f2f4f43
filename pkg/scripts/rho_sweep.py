#!/usr/bin/env python3
"""Sweep the corruption rate for a profile and print success rate per point.

Each (strategy, rho) cell reruns the profile's trial loop with the channel
overridden; output is one TSV row per cell, machine-greppable.

    python3 scripts/rho_sweep.py repeat-toy --trials 25 \
        --rhos 0 1/40 1/20 3/40 1/10 --strategies uniform burst
"""

import argparse
import sys
from fractions import Fraction

from streamcode.cli import run_experiment
from streamcode.profiles import load_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("profile")
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rhos", nargs="+", default=["0", "1/40", "1/20", "1/10"])
    ap.add_argument("--strategies", nargs="+", default=["uniform"])
    args = ap.parse_args()

    base = load_profile(args.profile)
    print("strategy\trho\ttrials\tsuccess_rate\tinvariant_fired")
    worst = 1.0
    for strategy in args.strategies:
        for rho in args.rhos:
            Fraction(rho)  # validate before mutating the profile
            prof = dict(base)
            prof["rho"] = rho
            prof["strategy"] = strategy
            report = run_experiment(prof, trials=args.trials, seed=args.seed)
            rate = report["aggregates"]["success_rate"]
            worst = min(worst, rate)
            print(f"{strategy}\t{rho}\t{args.trials}\t{rate:.3f}"
                  f"\t{report['invariant_fired']}")
    return 0 if worst > 0 else 1


if __name__ == "__main__":
    sys.exit(main())
