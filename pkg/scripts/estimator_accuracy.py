#!/usr/bin/env python3
"""Accuracy / query-cost sweep for the edge estimator.

Runs seeded trials over a small (n, p) grid and prints, per cell, the
fraction of trials within the (1±eps) target, the mean relative error,
and the mean query count.

Usage:
    python scripts/estimator_accuracy.py [--trials 20] [--epsilon 0.25]
"""
from __future__ import annotations

import argparse

import numpy as np

from bisq import BisOracle, estimate_edges, gen_gnp
from bisq.params import Constants


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--tolerance", type=float, default=0.30)
    ap.add_argument("--cT", type=float, default=8.0)
    ap.add_argument("--c2", type=float, default=4.0)
    ap.add_argument("--clambda", type=float, default=4.0)
    args = ap.parse_args()

    constants = Constants(c_T=args.cT, c2=args.c2, c_lambda=args.clambda)
    grid = [(256, 0.02), (512, 0.015), (1024, 0.01), (1024, 0.03)]
    print(f"eps={args.epsilon} tolerance={args.tolerance} trials={args.trials}"
          f" constants: c_T={args.cT} c2={args.c2} c_lambda={args.clambda}")
    print(f"{'n':>6} {'p':>7} {'m':>7} {'hit rate':>9} {'mean err':>9} "
          f"{'mean queries':>13}")
    for n, p in grid:
        g = gen_gnp(n, p, seed=("sweep", n, p))
        errs, queries = [], []
        for t in range(args.trials):
            o = BisOracle(g)
            m_hat = estimate_edges(o, args.epsilon, seed=("sweep-run", t),
                                   constants=constants)
            errs.append(abs(m_hat - g.m) / max(g.m, 1))
            queries.append(o.ledger.bis_count)
        hit = float(np.mean([e <= args.tolerance for e in errs]))
        print(f"{n:>6} {p:>7.3f} {g.m:>7} {hit:>9.2f} "
              f"{float(np.mean(errs)):>9.3f} {float(np.mean(queries)):>13.0f}")


if __name__ == "__main__":
    main()
