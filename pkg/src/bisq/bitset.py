"""Packed 64-bit-word bitset helpers.

All vertex sets and query masks in this package are dense bit arrays over
0..n-1, stored as little-endian uint64 words.  Tail bits past n are kept
zero so popcounts and equality tests stay exact.
"""
from __future__ import annotations

import numpy as np

WORD_BITS = 64
_U1 = np.uint64(1)
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


def word_count(n: int) -> int:
    return (n + WORD_BITS - 1) // WORD_BITS


def empty_words(n: int) -> np.ndarray:
    return np.zeros(word_count(n), dtype=np.uint64)


def full_words(n: int) -> np.ndarray:
    words = np.full(word_count(n), _FULL, dtype=np.uint64)
    return trim_tail(words, n)


def trim_tail(words: np.ndarray, n: int) -> np.ndarray:
    """Zero the bits at positions >= n in the last word (in place)."""
    rem = n % WORD_BITS
    if rem and words.size:
        words[..., -1] &= np.uint64((1 << rem) - 1)
    return words


def pack_indices(n: int, indices) -> np.ndarray:
    """Bit mask with the given vertex ids set."""
    idx = np.asarray(indices, dtype=np.int64).ravel()
    words = empty_words(n)
    if idx.size:
        if idx.min() < 0 or idx.max() >= n:
            raise ValueError(f"vertex id out of range 0..{n - 1}")
        np.bitwise_or.at(
            words, idx >> 6, np.left_shift(_U1, (idx & 63).astype(np.uint64))
        )
    return words


def members(words: np.ndarray, n: int) -> np.ndarray:
    """Sorted array of set bit positions below n."""
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:n]
    return np.nonzero(bits)[0].astype(np.int64)


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def contains(words: np.ndarray, i: int) -> bool:
    return bool((words[i >> 6] >> np.uint64(i & 63)) & _U1)


def random_planes(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform random bit planes; each bit is an independent fair coin."""
    return rng.integers(0, np.iinfo(np.uint64).max, size=shape,
                        dtype=np.uint64, endpoint=True)


def nested_rate_masks(rng: np.random.Generator, base: np.ndarray,
                      levels: int, reps: int) -> np.ndarray:
    """Subsample masks of ``base`` at rates 2^-i, i = 0..levels-1.

    Returns an array of shape (reps, levels, w).  Level 0 is ``base``
    itself; level i is level i-1 thinned by an independent fair coin per
    element, so the marginal keep rate at level i is exactly 2^-i.  Masks
    are nested within a repetition and independent across repetitions.
    """
    w = base.size
    out = np.empty((reps, levels, w), dtype=np.uint64)
    out[:, 0, :] = base
    if levels > 1:
        planes = random_planes(rng, (reps, levels - 1, w))
        np.bitwise_and.accumulate(planes, axis=1, out=planes)
        out[:, 1:, :] = planes & base[None, None, :]
    return out
