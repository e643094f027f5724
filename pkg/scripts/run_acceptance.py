"""Run every verification suite with its default settings and print one line each.

    python3 scripts/run_acceptance.py [--json results.json]
"""
import argparse
import sys
import time

from eqym import suites
from eqym.io import write_json


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--json", help="also write the results here")
    args = ap.parse_args()
    results = []
    for name, fn in suites.SUITES.items():
        t0 = time.perf_counter()
        res = fn()
        print(f"{res.line()}  [{name}, {time.perf_counter() - t0:.1f}s]", flush=True)
        results.append(res.to_json())
    if args.json:
        write_json(args.json, results)
    return 0 if all(r["passed"] for r in results) else 3


if __name__ == "__main__":
    sys.exit(main())
