"""Deterministic RNG stream derivation.

Every stochastic consumer gets its own stream derived from the world seed
and a stable name, so replay is bit-exact and reordering one consumer
never perturbs another.  Python's salted builtin hash is never used.
"""

from __future__ import annotations

import hashlib
import random


def stable_hash(*parts: object) -> int:
    """64-bit stable hash of the parts' text representations."""
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derive_stream(world_seed: int, *parts: object) -> random.Random:
    return random.Random(stable_hash(world_seed, *parts))
