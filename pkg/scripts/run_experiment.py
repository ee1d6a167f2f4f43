#!/usr/bin/env python3
"""Run encode -> corrupt -> decode trials for a profile and print the report.

Works for both codecs; the profile decides which.  The report echoes the
profile, so `streamcode run` (or this script) can replay it bit-exactly.

    python3 scripts/run_experiment.py repeat-toy --trials 20 --seed 1
    python3 scripts/run_experiment.py my-profile.txt --report out.json
"""

import argparse
import json
import sys

from streamcode.cli import _jsonable, run_experiment
from streamcode.profiles import load_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("profile", help="registered profile name or profile file")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--report", default=None, help="write JSON here (default stdout)")
    args = ap.parse_args()

    report = run_experiment(load_profile(args.profile),
                            trials=args.trials, seed=args.seed)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
        agg = report["aggregates"]
        print(f"wrote {args.report}: success_rate {agg['success_rate']:.3f} "
              f"over {agg['trials']} trials")
    else:
        print(text)
    return 1 if report["invariant_fired"] else 0


if __name__ == "__main__":
    sys.exit(main())
