#!/usr/bin/env python3
"""Per-edge frequency diagnostics for the near-uniform edge sampler.

Draws a batch from one pipeline on a fixed sparse graph and prints the
distribution of per-edge relative frequencies plus the total-variation
distance from uniform.

Usage:
    python scripts/sampler_bias.py [--n 256] [--draws 50000]
"""
from __future__ import annotations

import argparse
from collections import Counter

import numpy as np

from bisq import BisOracle, gen_gnp, sample_edges_batch
from bisq.edge_sampler import OK
from bisq.params import Constants


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--p", type=float, default=0.00306)
    ap.add_argument("--draws", type=int, default=50000)
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = gen_gnp(args.n, args.p, seed=args.seed)
    constants = Constants(c_T=8.0, c2=1.0, c_lambda=16.0, ser_pool_scale=4.0)
    oracle = BisOracle(g)
    outs = sample_edges_batch(oracle, args.draws, args.epsilon,
                              seed=("bias", args.seed), constants=constants)
    ok = [s for s in outs if s.status == OK]
    freq = Counter(tuple(sorted(s.edge)) for s in ok)
    non_edges = sum(1 for s in ok if not g.has_edge(*s.edge))
    rel = np.array([freq.get(e, 0) / len(ok) * g.m for e in g.edges()])
    tv = 0.5 * float(np.sum(np.abs(rel - 1.0))) / g.m
    print(f"graph n={g.n} m={g.m}; {len(ok)}/{len(outs)} draws succeeded; "
          f"{non_edges} non-edges")
    print(f"relative frequency: min={rel.min():.3f} "
          f"p5={np.percentile(rel, 5):.3f} median={np.median(rel):.3f} "
          f"p95={np.percentile(rel, 95):.3f} max={rel.max():.3f}")
    print(f"total variation from uniform: {tv:.4f}")
    print(f"queries: {oracle.ledger.bis_count:,}  "
          f"rounds: {oracle.ledger.round_count}")


if __name__ == "__main__":
    main()
