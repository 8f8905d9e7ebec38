#!/usr/bin/env python3
"""Run every verification suite and print a one-line summary per property.

Equivalent to ``tamecube verify --suite all`` with a readable console
digest; writes the full JSON report next to the summary.
"""

import argparse
import json
from datetime import datetime, timezone
from pathlib import Path

from tamecube.suites import SuiteConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--grid", type=int, default=33)
    ap.add_argument("--out", default="verification_report.json")
    args = ap.parse_args()

    cfg = SuiteConfig(suite="all", grid_res=args.grid, seed=args.seed)
    report = run_suite(cfg)
    report["timestamp"] = datetime.now(timezone.utc).isoformat()
    Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")

    width = max(len(r["name"]) for r in report["results"])
    for r in report["results"]:
        status = "ok " if r["passed"] else "FAIL"
        print(f"{status} {r['name']:<{width}} worst={r['worst']:9.2e} tol={r['tol']:7.0e} {r['params']}")
    print(f"\n{len(report['results'])} properties, {report['failures']} failures -> {args.out}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
