#!/usr/bin/env python3
"""Dry-run budget tables for the written-constant profile.

Prints planned query counts (no execution) for the neighborhood-size
estimator, the full edge estimator, and single element recovery over a
grid of sizes, with the ratios against their target growth rates.

Usage:
    python scripts/audit_scaling.py [--epsilon 0.25] [--delta 0.1]
"""
from __future__ import annotations

import argparse

from bisq import audit


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--min-exp", type=int, default=8)
    ap.add_argument("--max-exp", type=int, default=12)
    args = ap.parse_args()
    grid = [2 ** k for k in range(args.min_exp, args.max_exp + 1)]

    print("neighborhood-size plans (ratio vs eps^-2 log n log(log n / delta))")
    for row in audit.ns_audit(grid, args.epsilon, args.delta):
        print(f"  n={row.n:>6}  planned={row.planned:>14,}  "
              f"ratio={row.ratio:.3g}")

    print("edge-estimator plans (ratio vs eps^-5 log^5 n)")
    rows = audit.estimator_audit(grid, args.epsilon)
    for row in rows:
        print(f"  n={row.n:>6}  planned={row.planned:>22,}  "
              f"ratio={row.ratio:.3g}")
    print(f"  ratio band across the grid: {audit.ratio_band(rows):.2f}x")

    print("single-element-recovery plans (ratio vs log^2 N log(1/delta))")
    for row in audit.ser_audit(grid, args.delta):
        print(f"  N={row.n:>6}  planned={row.planned:>10,}  "
              f"ratio={row.ratio:.3g}")

    print("connectivity round-1 plans (growth in n after polylog removal)")
    for n in grid:
        planned = audit.round1_planned_queries(n)
        print(f"  n={n:>6}  planned={planned:>14,}  "
              f"planned/n={planned / n:,.0f}")


if __name__ == "__main__":
    main()
