"""Seeded random streams.

Streams come from numpy's Philox4x32 counter-based generator.  A stream is
identified by ``(seed, tag, index)`` so that the draw for, say, trial 17 of
a run does not depend on which other trials ran or in what order.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_key(tag: str) -> int:
    # crc32 is stable across interpreters, unlike hash().
    return zlib.crc32(tag.encode("utf-8"))


def derive_rng(seed: int, tag: str, *index: int) -> np.random.Generator:
    """Independent generator for ``(seed, tag, *index)``."""
    if seed < 0 or any(i < 0 for i in index):
        raise ValueError("seed and stream indices must be non-negative")
    ss = np.random.SeedSequence([int(seed), _tag_key(tag), *map(int, index)])
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, tag: str, *index: int) -> int:
    """A 63-bit integer seed for ``(seed, tag, *index)``, for handing to child calls."""
    ss = np.random.SeedSequence([int(seed), _tag_key(tag), *map(int, index)])
    hi, lo = (int(v) for v in ss.generate_state(2, dtype=np.uint32))
    return ((hi << 32) | lo) & ((1 << 63) - 1)
