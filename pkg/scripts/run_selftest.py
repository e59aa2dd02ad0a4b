#!/usr/bin/env python3
"""Run the acceptance checks and write a JSON summary next to the printed report."""

import argparse
import json
import sys

from jetvar.selftest import CRITERIA, run_selftest


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--only", default="", help="comma-separated criterion numbers")
    ap.add_argument("--json", dest="json_path", default=None, help="write a JSON summary here")
    args = ap.parse_args(argv)

    only = [int(k) for k in args.only.split(",") if k] or sorted(CRITERIA)
    results = run_selftest(args.seed, only, args.quick,
                           report=lambda r: print(r.line(timing=True), flush=True))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    if args.json_path:
        rows = [{"criterion": r.number, "name": r.name, "passed": r.passed,
                 "detail": r.detail, "seconds": round(r.seconds, 3)} for r in results]
        with open(args.json_path, "w") as fh:
            json.dump({"schema": 1, "seed": args.seed, "results": rows}, fh, indent=2)
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
