"""Splittable counter-based randomness.

Every sampler draws from a named substream derived from (seed, path), so any
artifact can be regenerated from the (seed, path) pair recorded in its
metadata, and distinct substreams are statistically independent: fixing one
substream's path isolates it from reseeding of the others.
"""

from __future__ import annotations

import zlib

import numpy as np


def _path_key(path) -> tuple[int, ...]:
    key = []
    for part in path:
        if isinstance(part, str):
            key.append(zlib.crc32(part.encode("utf-8")))
        else:
            key.append(int(part))
    return tuple(key)


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for the substream at `path` under `seed` (Philox, counter-based)."""
    ss = np.random.SeedSequence(seed, spawn_key=_path_key(path))
    return np.random.Generator(np.random.Philox(ss))


def describe(seed: int, *path) -> dict:
    """Metadata stanza recording how a substream was derived."""
    return {"seed": int(seed), "path": [str(p) for p in path]}
