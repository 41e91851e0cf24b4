"""Counter-based seed derivation.

One master seed is split into independent named streams, so adding trials
or phases never perturbs the randomness of earlier ones.  Labels are
hashed with blake2s; integers pass through as entropy words.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _entropy_word(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2s(str(part).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_seq(*parts) -> np.random.SeedSequence:
    return np.random.SeedSequence([_entropy_word(p) for p in parts])


def rng_for(*parts) -> np.random.Generator:
    """Deterministic generator for the stream named by ``parts``."""
    return np.random.Generator(np.random.PCG64(seed_seq(*parts)))
