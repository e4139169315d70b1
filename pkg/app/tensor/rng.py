"""Seeded generators.

All randomness goes through ``numpy.random.Generator`` over ``PCG64`` seeded
with a ``SeedSequence``. numpy guarantees stream stability for a given
bit generator and seed, so sequences are identical across platforms.
Sub-streams for independent consumers are keyed by the seed plus a crc32
word per tag, rather than drawn from a parent stream, so adding a consumer
never shifts another consumer's numbers.
"""
from __future__ import annotations

import zlib

import numpy as np

from app.core.errors import UsageError


def check_seed(seed: int) -> int:
    try:
        value = int(seed)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"seed must be an integer, got {seed!r}") from exc
    if value < 0 or value != seed:
        raise UsageError(f"seed must be a non-negative integer, got {seed!r}")
    return value


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed))))


def derive_rng(seed: int, *tags: str | int) -> np.random.Generator:
    words = [check_seed(seed)]
    for tag in tags:
        words.append(zlib.crc32(str(tag).encode("utf-8")))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))
