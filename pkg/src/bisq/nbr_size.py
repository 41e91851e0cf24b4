"""Non-adaptive (1±eps) estimator for the neighborhood size |Gamma(L) ∩ R|.

The plan subsamples R at geometric rates 2^-i and counts, per level, how
many of T repetitions produce a no-edge answer against L.  Decoding finds
the first level whose no-edge frequency clears a fixed threshold and
inverts the closed form E[count]/T = (1 - 2^-i)^N.

Sizes 0 and 1 decode exactly: an empty neighborhood answers 1 everywhere,
and with a nonempty one the decoded value identifies size 1 because no
integer size >= 2 can decode below 1.5 while the per-level counts obey
their (1±eps) guarantee.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import bitset, params
from .errors import NsDecodeError
from .graph import VertexSet
from .oracle import BisOracle, QueryPlan, SubsampleBlock
from .params import Constants
from .seeding import rng_for

# decode threshold numerator: a level is "low" when count/T < (1-eps)/(2 e^2)
_THRESHOLD_BASE = 1.0 / (2.0 * math.e ** 2)
# a decoded value below this, with a provably nonempty neighborhood,
# can only be size 1
_UNIT_CUTOFF = 1.5


@dataclass(frozen=True)
class NsParams:
    epsilon: float
    delta: float
    levels: int
    reps: int
    profile: str

    @classmethod
    def create(cls, n: int, epsilon: float, delta: float, profile: str,
               constants: Constants = Constants()) -> "NsParams":
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        epsilon = min(epsilon, 0.5)   # threshold separation needs eps <= 1/2
        if not 0 < delta <= 0.5:
            raise ValueError("delta must lie in (0, 1/2]")
        return cls(epsilon=epsilon, delta=delta,
                   levels=params.ns_levels(n),
                   reps=params.ns_reps(n, epsilon, delta, profile, constants),
                   profile=profile)


@dataclass
class NsCounts:
    """Per-level tallies of no-edge answers; counts[i] in 0..reps."""
    counts: np.ndarray
    reps: int

    @staticmethod
    def expected_rate(level: int, size: int) -> float:
        """Closed-form no-edge rate (1 - 2^-level)^size (analysis only)."""
        return (1.0 - 2.0 ** -level) ** size


def plan_ns(left: VertexSet, right: VertexSet, ns: NsParams, seed,
            tag: str = "ns") -> QueryPlan:
    """Build the full query plan; issues no oracle queries.

    Entry (i, t) is (L, R_i^t) where R_i^t keeps each member of R with
    probability 2^-i.  Row index within the block is t * levels + i.
    """
    if not left.isdisjoint(right):
        raise ValueError("left and right sets overlap")
    rng = rng_for(seed, "ns-plan")
    masks = bitset.nested_rate_masks(rng, right.words, ns.levels, ns.reps)
    plan = QueryPlan(left.n)
    plan.add(SubsampleBlock(tag, left.words, right.words, masks))
    return plan


def counts_from_answers(answers: np.ndarray, ns: NsParams) -> NsCounts:
    counts = answers.reshape(ns.reps, ns.levels).sum(axis=0).astype(np.int64)
    return NsCounts(counts=counts, reps=ns.reps)


def decode_ns(counts: NsCounts, ns: NsParams) -> float:
    """Invert the per-level counts into a size estimate.

    Raises NsDecodeError when the selected level has a zero count (the
    logarithm is undefined there); callers treat that as one failure
    inside the delta budget.
    """
    T = counts.reps
    c = counts.counts
    if c[0] == T:
        return 0.0
    threshold = (1.0 - ns.epsilon) * _THRESHOLD_BASE
    low = np.nonzero(c / T < threshold)[0]
    if low.size == 0:
        # unreachable with real answers (level 0 is deterministic); guard
        # for synthetic counts
        warnings.warn("no level under threshold; decoding at the top level")
        i_hat = ns.levels - 1
    else:
        i_hat = int(low.max()) + 1
        if i_hat >= ns.levels:
            warnings.warn("threshold crossing at the top level; decoding there")
            i_hat = ns.levels - 1
    if c[i_hat] == 0:
        raise NsDecodeError(f"zero count at decode level {i_hat}")
    estimate = math.log(c[i_hat] / T) / math.log1p(-(2.0 ** -i_hat))
    if estimate < _UNIT_CUTOFF:
        return 1.0
    return estimate


def estimate_ns(oracle: BisOracle, left: VertexSet, right: VertexSet,
                epsilon: float, delta: float, seed,
                profile: str = params.FAST,
                constants: Constants = Constants(),
                tag: str = "ns") -> float:
    """Plan, submit one batch, decode.  Contributes one adaptivity round."""
    ns = NsParams.create(oracle.n, epsilon, delta, profile, constants)
    plan = plan_ns(left, right, ns, seed, tag=tag)
    with oracle.round():
        answers = oracle.submit(plan)[0]
    estimate = decode_ns(counts_from_answers(answers, ns), ns)
    return min(estimate, float(len(right)))
