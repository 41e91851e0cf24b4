"""Count-min style additive degree estimates for every vertex of a set.

Each repetition assigns the vertices of S to random cells; the
neighborhood size of each nonempty cell (against everything outside it)
upper-bounds the degree of each of its members up to the other members'
degree mass, and the minimum over repetitions tightens the overestimate.
Extended mode additionally recovers, per cell, a pool of uniform members
of the cell's outside neighborhood, giving each vertex a near-uniform
neighbor candidate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from . import bitset, params
from .errors import NsDecodeError
from .graph import VertexSet
from .nbr_size import NsParams, decode_ns, NsCounts
from .oracle import BisOracle, QueryPlan, SharedSubsampleBlock
from .element_recovery import build_neighbor_recovery
from .params import Constants
from .seeding import rng_for


@dataclass
class PartitionSchedule:
    """Seed-derived cell assignment: (rep, position-in-S) -> cell id."""
    reps: int
    cells: int
    assignment: np.ndarray   # (reps, |S|) int64

    @classmethod
    def build(cls, size: int, n: int, epsilon: float, extended: bool,
              seed, constants: Constants) -> "PartitionSchedule":
        reps = params.deg_reps(n)
        cells = params.deg_parts(n, epsilon, extended, constants)
        assignment = np.empty((reps, size), dtype=np.int64)
        for t in range(reps):
            assignment[t] = rng_for(seed, "deg-assign", t).integers(
                0, cells, size=size)
        return cls(reps=reps, cells=cells, assignment=assignment)


@dataclass
class DegreeTable:
    vertices: np.ndarray     # member ids of S, sorted
    d_hat: np.ndarray        # float64 estimates, min over repetitions
    t_min: np.ndarray        # repetition achieving the minimum, -1 if none
    failed: np.ndarray       # all repetitions failed; d_hat holds sentinel n

    def lookup(self, v: int) -> float:
        i = int(np.searchsorted(self.vertices, v))
        if i >= self.vertices.size or self.vertices[i] != v:
            raise KeyError(f"vertex {v} not in table")
        return float(self.d_hat[i])


@dataclass
class NeighborTable:
    vertices: np.ndarray
    neighbor: np.ndarray     # candidate uniform neighbor, -1 when absent
    cell_size: np.ndarray    # size of the chosen repetition's cell
    cell_of: np.ndarray      # cell id at the chosen repetition
    pools: dict = field(default_factory=dict)   # (rep, cell) -> vertex pool


def _group_cells(assignment_row: np.ndarray):
    """Yield (cell_id, positions) for nonempty cells, cell id ascending."""
    order = np.argsort(assignment_row, kind="stable")
    sorted_cells = assignment_row[order]
    boundaries = np.nonzero(np.diff(sorted_cells))[0] + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [sorted_cells.size]))
    for s, e in zip(starts, ends):
        yield int(sorted_cells[s]), order[s:e]


def _run_sketch(oracle: BisOracle, subset: VertexSet, epsilon: float, seed,
                profile: str, constants: Constants, extended: bool,
                tag: str):
    n = oracle.n
    members = subset.members()
    size = int(members.size)
    d_hat = np.full(size, np.inf)
    t_min = np.full(size, -1, dtype=np.int64)
    pools: dict = {}
    if size == 0:
        table = DegreeTable(vertices=members, d_hat=d_hat, t_min=t_min,
                            failed=np.zeros(0, dtype=bool))
        if extended:
            return table, NeighborTable(
                vertices=members, neighbor=np.full(0, -1, dtype=np.int64),
                cell_size=np.zeros(0, dtype=np.int64),
                cell_of=np.full(0, -1, dtype=np.int64), pools=pools)
        return table, None

    schedule = PartitionSchedule.build(size, n, epsilon, extended, seed,
                                       constants)
    ns = NsParams.create(n, epsilon, params.deg_delta_inner(n), profile,
                         constants)
    full = bitset.full_words(n)
    delta_ser = params.ser_delta(n, epsilon, constants)
    ser_reps = max(1, math.ceil(
        params.ser_reps(delta_ser, constants) * constants.ser_pool_scale))

    with oracle.round():
        for t in range(schedule.reps):
            planes = bitset.nested_rate_masks(
                rng_for(seed, "deg-planes", t), full, ns.levels, ns.reps)
            groups = list(_group_cells(schedule.assignment[t]))
            parts = []
            recoveries = []
            for cell_id, positions in groups:
                ids = members[positions]
                left = bitset.pack_indices(n, ids)
                base = bitset.trim_tail(~left, n)
                parts.append((left, base))
                if extended:
                    recoveries.append(build_neighbor_recovery(
                        n, VertexSet(n, left), VertexSet(n, base), ser_reps,
                        (seed, "deg-ser", t, cell_id), tag=tag + "-ser"))
            plan = QueryPlan(n, [SharedSubsampleBlock(tag, planes, parts)])
            for rec in recoveries:
                plan.add(rec.block)
            answers = oracle.submit(plan)
            ns_answers = answers[0].reshape(len(parts), ns.reps * ns.levels)
            for gi, (cell_id, positions) in enumerate(groups):
                counts = NsCounts(
                    counts=ns_answers[gi].reshape(ns.reps, ns.levels)
                    .sum(axis=0).astype(np.int64),
                    reps=ns.reps)
                try:
                    est = decode_ns(counts, ns)
                except NsDecodeError:
                    est = np.inf   # one bad repetition cannot sink the min
                est = min(est, float(n - positions.size))
                better = est < d_hat[positions]
                d_hat[positions[better]] = est
                t_min[positions[better]] = t
                if extended:
                    pools[(t, cell_id)] = recoveries[gi].decode_pool(
                        answers[1 + gi])

    failed = ~np.isfinite(d_hat)
    d_hat[failed] = float(n)   # sentinel, flagged
    table = DegreeTable(vertices=members, d_hat=d_hat, t_min=t_min,
                        failed=failed)
    if not extended:
        return table, None

    neighbor = np.full(size, -1, dtype=np.int64)
    cell_size = np.zeros(size, dtype=np.int64)
    cell_of = np.full(size, -1, dtype=np.int64)
    for i in range(size):
        t = int(t_min[i])
        if t < 0:
            continue
        cell = int(schedule.assignment[t, i])
        cell_of[i] = cell
        cell_size[i] = int((schedule.assignment[t] == cell).sum())
        pool = pools.get((t, cell))
        if pool is not None and pool.size:
            neighbor[i] = int(pool[0])
    ntable = NeighborTable(vertices=members, neighbor=neighbor,
                           cell_size=cell_size, cell_of=cell_of, pools=pools)
    return table, ntable


def estimate_degrees(oracle: BisOracle, subset: VertexSet, epsilon: float,
                     seed, profile: str = params.FAST,
                     constants: Constants = Constants(),
                     tag: str = "deg-ns") -> DegreeTable:
    """Degree estimates for every vertex of the subset; one round."""
    table, _ = _run_sketch(oracle, subset, epsilon, seed, profile, constants,
                           extended=False, tag=tag)
    return table


def estimate_degrees_with_neighbors(
        oracle: BisOracle, subset: VertexSet, epsilon: float, seed,
        profile: str = params.FAST, constants: Constants = Constants(),
        tag: str = "deg-ns") -> tuple[DegreeTable, NeighborTable]:
    """Extended mode: degree estimates plus per-vertex neighbor candidates."""
    table, ntable = _run_sketch(oracle, subset, epsilon, seed, profile,
                                constants, extended=True, tag=tag)
    return table, ntable


def predict_sketch_queries(n: int, subset_size: int, epsilon: float, seed,
                           profile: str = params.FAST,
                           constants: Constants = Constants(),
                           extended: bool = False) -> int:
    """Seed-exact dry-run query count for the sketch; matches execution."""
    if subset_size == 0:
        return 0
    schedule = PartitionSchedule.build(subset_size, n, epsilon, extended,
                                       seed, constants)
    ns_size = params.ns_plan_size(n, min(epsilon, 0.5),
                                  params.deg_delta_inner(n), profile,
                                  constants)
    delta_ser = params.ser_delta(n, epsilon, constants)
    ser_reps = max(1, math.ceil(
        params.ser_reps(delta_ser, constants) * constants.ser_pool_scale))
    total = 0
    for t in range(schedule.reps):
        for _cell, positions in _group_cells(schedule.assignment[t]):
            total += ns_size
            if extended:
                domain = n - positions.size
                total += (params.ser_levels(domain) * ser_reps
                          * params.ser_rows_per_rep(domain))
    return total
