"""Stable seed derivation.

All randomness in a match flows from one root seed through named
sub-streams, so adding a consumer of one stream can never perturb another
and every derivation is reproducible across runs and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(*parts: object) -> int:
    """Hash arbitrary labels (ids, indices) into a 63-bit seed."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def make_rng(*keys: int) -> np.random.Generator:
    """PCG64 generator keyed by a tuple of integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(keys)))
