"""Run the acceptance criteria and write a JSON summary.

    python3 scripts/run_acceptance.py [--only 2,7] [--out results/acceptance.json]
"""

import argparse
import json
import sys
from pathlib import Path

from minkdiff.acceptance import CRITERIA, run_acceptance
from minkdiff.cli import _plain


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", default=None, help="comma list of criterion numbers")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    which = sorted(CRITERIA) if args.only is None else [int(s) for s in args.only.split(",")]
    results = run_acceptance(which)
    for r in results:
        print(r.line())
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        rows = [{"criterion": r.number, "name": r.name, "pass": r.passed,
                 "details": r.details} for r in results]
        Path(args.out).write_text(json.dumps(_plain(rows), indent=2) + "\n")
    return 0 if all(r.passed for r in results) else 2


if __name__ == "__main__":
    sys.exit(main())
