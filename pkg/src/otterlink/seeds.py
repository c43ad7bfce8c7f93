"""Stable derived randomness.

All behavioural randomness (list draws, social rotation, jitter, suggestion
picks) is keyed by seeds plus context parts through a cryptographic hash, so
the same inputs give the same draws on any machine, in any process, with no
shared RNG state to thread around.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts: object) -> int:
    """64-bit seed from the string forms of ``parts``."""
    material = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(material, digest_size=8).digest(), "big")


def derive_rng(*parts: object) -> random.Random:
    return random.Random(derive_seed(*parts))
