"""
Deterministic random streams.

Every random draw in hetfuse comes from a counter-based Philox generator whose key is
derived by hashing ``(base_seed, purpose tag, index...)``. Two streams with different
tags or indices never share state, so results do not depend on execution order.
"""

import hashlib

import numpy as np

_SEED_BITS = 63


def derive_seed(base_seed: int, tag: str, *index: int | str) -> int:
    """Derive a child seed from a base seed, a purpose tag and optional indices."""
    material = ":".join([str(int(base_seed)), tag, *(str(i) for i in index)])
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> (64 - _SEED_BITS)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def child_rng(base_seed: int, tag: str, *index: int | str) -> np.random.Generator:
    return make_rng(derive_seed(base_seed, tag, *index))
