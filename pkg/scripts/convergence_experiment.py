#!/usr/bin/env python3
"""Run the manufactured-solution convergence suite and print the grade sheet.

Spatial study: final-time error against the exact field at N = 16, 24, 32.
Temporal study: error ratios under dt halving for both schemes.
"""

import argparse
import sys

from moistpe.convergence import suite


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true",
                    help="trim the spatial ladder to its 16/32 endpoints")
    args = ap.parse_args(argv)

    report = suite(quick=args.quick)
    for row in report.rows:
        flag = "    " if row.passed is None else ("ok  " if row.passed else "FAIL")
        print(f"{flag} {row.suite:10s} {row.name:28s} value {row.value:.6e}  target {row.target}")
    print(f"runtime {report.runtime:.1f}s  passed {report.passed}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
