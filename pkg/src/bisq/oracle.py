"""Bipartite-edge-existence oracle with exact query and round accounting.

A query gives two disjoint vertex sets (L, R) and the oracle answers 1
iff no edge of the hidden graph crosses between them.  Queries are
submitted in plans (batches of blocks); a plan built without looking at
any prior answer costs one adaptivity round, which callers express with
``with oracle.round(): ...`` scopes.

Blocks come in three shapes so the planners can hand over structured
subsample masks instead of one row per query; evaluation is exact and
equivalent to answering every materialized (L, R) row separately, which
`iter_rows` exposes for verification.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Iterator, Optional

import numpy as np

from . import bitset
from .errors import DisjointnessError
from .graph import Graph, VertexSet

# below this support size the oracle answers from the support side,
# touching N columns instead of full mask rows
_SUPPORT_DENSE_CUTOFF = 48


class QueryLedger:
    """Counts of queries, batches, and adaptivity rounds, by phase label."""

    def __init__(self):
        self.bis_count = 0
        self.batch_count = 0
        self.round_count = 0
        self.phases: dict[str, int] = {}
        self._lock = threading.Lock()

    def charge(self, tag: str, k: int, batches: int = 0, rounds: int = 0) -> None:
        with self._lock:
            self.bis_count += k
            self.batch_count += batches
            self.round_count += rounds
            if k:
                self.phases[tag] = self.phases.get(tag, 0) + k

    def snapshot(self) -> dict:
        return {
            "bis_count": self.bis_count,
            "batch_count": self.batch_count,
            "round_count": self.round_count,
            "phases": dict(self.phases),
        }

    def delta(self, before: dict) -> dict:
        now = self.snapshot()
        return {
            "bis_count": now["bis_count"] - before["bis_count"],
            "batch_count": now["batch_count"] - before["batch_count"],
            "round_count": now["round_count"] - before["round_count"],
            "phases": {
                k: now["phases"].get(k, 0) - before["phases"].get(k, 0)
                for k in set(now["phases"]) | set(before["phases"])
                if now["phases"].get(k, 0) != before["phases"].get(k, 0)
            },
        }

    def as_dict(self) -> dict:
        return self.snapshot()


# ---------------------------------------------------------------------------
# plan blocks
# ---------------------------------------------------------------------------

class DenseBlock:
    """Explicit query rows; ``left`` has one row per group of right rows."""

    __slots__ = ("tag", "left", "right", "rows_per_group")

    def __init__(self, tag: str, left: np.ndarray, right: np.ndarray,
                 rows_per_group: int):
        if right.shape[0] != left.shape[0] * rows_per_group:
            raise ValueError("right row count must be groups * rows_per_group")
        self.tag = tag
        self.left = left
        self.right = right
        self.rows_per_group = rows_per_group

    def n_queries(self) -> int:
        return self.right.shape[0]

    def validate(self) -> None:
        g = self.left.shape[0]
        r3 = self.right.reshape(g, self.rows_per_group, -1)
        bad = (r3 & self.left[:, None, :]).any(axis=2)
        if bad.any():
            gi, ri = np.argwhere(bad)[0]
            raise DisjointnessError(
                f"block {self.tag!r}: query {gi * self.rows_per_group + ri} "
                "has overlapping L and R")

    def evaluate(self, graph: Graph) -> np.ndarray:
        g = self.left.shape[0]
        n = graph.n
        gammas = np.empty_like(self.left)
        for i in range(g):
            gammas[i] = graph.neighborhood_words(bitset.members(self.left[i], n))
        r3 = self.right.reshape(g, self.rows_per_group, -1)
        hit = (r3 & gammas[:, None, :]).any(axis=2)
        return (~hit).astype(np.uint8).ravel()

    def iter_rows(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for idx in range(self.right.shape[0]):
            yield self.left[idx // self.rows_per_group], self.right[idx]


class SubsampleBlock:
    """One left set against nested subsample masks of a base set.

    ``masks`` has shape (reps, levels, w); row index r * levels + i maps
    to the query (left, masks[r, i]).  Masks are already subsets of base.
    """

    __slots__ = ("tag", "left", "base", "masks")

    def __init__(self, tag: str, left: np.ndarray, base: np.ndarray,
                 masks: np.ndarray):
        self.tag = tag
        self.left = left
        self.base = base
        self.masks = masks

    @property
    def reps(self) -> int:
        return self.masks.shape[0]

    @property
    def levels(self) -> int:
        return self.masks.shape[1]

    def n_queries(self) -> int:
        return self.masks.shape[0] * self.masks.shape[1]

    def validate(self) -> None:
        if (self.left & self.base).any():
            raise DisjointnessError(
                f"block {self.tag!r}: left overlaps the sampled base set")

    def evaluate(self, graph: Graph) -> np.ndarray:
        support = graph.neighborhood_words(
            bitset.members(self.left, graph.n)) & self.base
        hit = _subsample_hits(self.masks, support)
        return (~hit).astype(np.uint8).ravel()

    def row_words(self, rep: int, level: int) -> np.ndarray:
        return self.masks[rep, level]

    def iter_rows(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        reps, levels, _ = self.masks.shape
        for r in range(reps):
            for i in range(levels):
                yield self.left, self.masks[r, i]


class SharedSubsampleBlock:
    """Many (left, base) pairs sharing one stack of subsample planes.

    ``planes`` has shape (reps, levels, w) over the full vertex domain;
    the materialized row for part p is planes[r, i] & base_p.  Row index:
    p * reps * levels + r * levels + i.
    """

    __slots__ = ("tag", "planes", "parts", "_planes_t")

    def __init__(self, tag: str, planes: np.ndarray,
                 parts: list[tuple[np.ndarray, np.ndarray]]):
        self.tag = tag
        self.planes = planes
        self.parts = parts
        self._planes_t = None

    def n_queries(self) -> int:
        return len(self.parts) * self.planes.shape[0] * self.planes.shape[1]

    def validate(self) -> None:
        for pi, (left, base) in enumerate(self.parts):
            if (left & base).any():
                raise DisjointnessError(
                    f"block {self.tag!r}: part {pi} left overlaps base")

    def planes_t(self) -> np.ndarray:
        if self._planes_t is None:
            self._planes_t = np.ascontiguousarray(
                self.planes.transpose(2, 0, 1))
        return self._planes_t

    def evaluate(self, graph: Graph) -> np.ndarray:
        reps, levels, _ = self.planes.shape
        out = np.empty((len(self.parts), reps * levels), dtype=np.uint8)
        for pi, (left, base) in enumerate(self.parts):
            support = graph.neighborhood_words(
                bitset.members(left, graph.n)) & base
            n_sup = bitset.popcount(support)
            if n_sup == 0:
                out[pi] = 1
            elif n_sup <= _SUPPORT_DENSE_CUTOFF:
                ids = bitset.members(support, graph.n)
                hit = np.zeros((reps, levels), dtype=bool)
                pt = self.planes_t()
                for u in ids:
                    hit |= (pt[u >> 6] >> np.uint64(u & 63)) & np.uint64(1) != 0
                out[pi] = (~hit).astype(np.uint8).ravel()
            else:
                hit = _subsample_hits(self.planes, support)
                out[pi] = (~hit).astype(np.uint8).ravel()
        return out.ravel()

    def row_words(self, part: int, rep: int, level: int) -> np.ndarray:
        return self.planes[rep, level] & self.parts[part][1]

    def iter_rows(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        reps, levels, _ = self.planes.shape
        for left, base in self.parts:
            for r in range(reps):
                for i in range(levels):
                    yield left, self.planes[r, i] & base


class SidesSubsampleBlock:
    """Subsample masks refined by fixed side masks (bit-decoding queries).

    Row for (level l, rep r, side q) is masks[r, l] & sides[q]; row index
    l * reps * n_sides + r * n_sides + q.  Used by the single-element
    recovery plans, where sides are the bit-slice sets of the domain.
    """

    __slots__ = ("tag", "left", "base", "masks", "sides")

    def __init__(self, tag: str, left: np.ndarray, base: np.ndarray,
                 masks: np.ndarray, sides: np.ndarray):
        self.tag = tag
        self.left = left
        self.base = base
        self.masks = masks          # (reps, levels, w), subsets of base
        self.sides = sides          # (n_sides, w)

    def n_queries(self) -> int:
        reps, levels, _ = self.masks.shape
        return levels * reps * self.sides.shape[0]

    def validate(self) -> None:
        if (self.left & self.base).any():
            raise DisjointnessError(
                f"block {self.tag!r}: left overlaps the sampled base set")

    def evaluate(self, graph: Graph) -> np.ndarray:
        reps, levels, w = self.masks.shape
        nq = self.sides.shape[0]
        support = graph.neighborhood_words(
            bitset.members(self.left, graph.n)) & self.base
        ids = bitset.members(support, graph.n)
        n_sup = ids.size
        if n_sup == 0:
            return np.ones(levels * reps * nq, dtype=np.uint8)
        if n_sup <= _SUPPORT_DENSE_CUTOFF:
            incl = np.empty((n_sup, reps, levels), dtype=np.float32)
            smem = np.empty((n_sup, nq), dtype=np.float32)
            for k, u in enumerate(ids):
                wu, bu = u >> 6, np.uint64(u & 63)
                incl[k] = (self.masks[:, :, wu] >> bu) & np.uint64(1)
                smem[k] = (self.sides[:, wu] >> bu) & np.uint64(1)
            flat = incl.reshape(n_sup, -1)                 # (N, reps*levels)
            counts = flat.T @ smem                         # (reps*levels, nq)
            hit = counts.reshape(reps, levels, nq) > 0.5
            hit = hit.transpose(1, 0, 2)                   # (levels, reps, nq)
        else:
            rows = self.masks[:, :, None, :] & (self.sides & support)[None, None, :, :]
            hit = rows.any(axis=3).transpose(1, 0, 2)
        return (~hit).astype(np.uint8).ravel()

    def iter_rows(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        reps, levels, _ = self.masks.shape
        for l in range(levels):
            for r in range(reps):
                for q in range(self.sides.shape[0]):
                    yield self.left, self.masks[r, l] & self.sides[q]


def _subsample_hits(masks: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Per-row edge-hit flags for masks of shape (..., w) against support."""
    return (masks & support).any(axis=-1)


PlanBlock = (DenseBlock, SubsampleBlock, SharedSubsampleBlock, SidesSubsampleBlock)


class QueryPlan:
    """Ordered blocks of queries, built entirely before any submission."""

    def __init__(self, n: int, blocks: Optional[list] = None):
        self.n = n
        self.blocks = list(blocks) if blocks else []

    def add(self, block) -> None:
        self.blocks.append(block)

    def size(self) -> int:
        return sum(b.n_queries() for b in self.blocks)

    def phase_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for b in self.blocks:
            out[b.tag] = out.get(b.tag, 0) + b.n_queries()
        return out

    def validate(self) -> None:
        for b in self.blocks:
            b.validate()

    def iter_rows(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for b in self.blocks:
            yield from b.iter_rows()


# ---------------------------------------------------------------------------
# the oracle
# ---------------------------------------------------------------------------

class BisOracle:
    """Answers edge-existence queries against a hidden Graph.

    Answers are a pure function of (graph, query).  Every submission is
    counted; a submission outside a round scope is charged its own round.
    """

    def __init__(self, graph: Graph, ledger: Optional[QueryLedger] = None):
        self.graph = graph
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._depth = 0
        self._charged = False

    @property
    def n(self) -> int:
        return self.graph.n

    @contextmanager
    def round(self):
        self._depth += 1
        try:
            yield self
        finally:
            self._depth -= 1
            if self._depth == 0:
                self._charged = False

    def _charge_round(self) -> int:
        if self._depth == 0:
            return 1
        if not self._charged:
            self._charged = True
            return 1
        return 0

    def submit(self, plan: QueryPlan) -> list[np.ndarray]:
        """Answer every query in the plan; one answer array per block."""
        plan.validate()
        rounds = self._charge_round()
        answers = [b.evaluate(self.graph) for b in plan.blocks]
        self.ledger.charge("_batch", 0, batches=1, rounds=rounds)
        for b, a in zip(plan.blocks, answers):
            self.ledger.charge(b.tag, int(a.size))
        return answers

    def bis(self, left: VertexSet, right: VertexSet, tag: str = "adhoc") -> int:
        """Single query: 1 iff no edge joins left and right."""
        if not left.isdisjoint(right):
            raise DisjointnessError("bis: L and R overlap")
        rounds = self._charge_round()
        gamma = self.graph.neighborhood_words(left.members())
        answer = 0 if (gamma & right.words).any() else 1
        self.ledger.charge(tag, 1, batches=1, rounds=rounds)
        return answer


def or_query_via_bis(oracle: BisOracle, left: VertexSet,
                     r_subset: VertexSet, tag: str = "or") -> int:
    """Edge-subset OR query for pairs L x R_subset, as exactly one query.

    Returns 1 iff Gamma(L) ∩ R_subset is empty.
    """
    return oracle.bis(left, r_subset, tag=tag)
