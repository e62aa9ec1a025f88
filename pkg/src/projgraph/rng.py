"""Deterministic, splittable random streams.

Every stochastic routine in this package draws from a stream derived by
:func:`substream` from a single master seed plus a path of identifying
parts (for example ``("growth", cell_index, replicate_index)``).  The
derivation is pure: a given ``(master_seed, *parts)`` always yields the
same stream, independent of the order in which streams are created and
of how work is scheduled across threads.  Reports produced from the same
master seed are therefore byte-identical across runs and worker counts.

Derivation, exactly: string parts are folded to 64-bit integers via the
first 8 bytes of their SHA-256 digest (big-endian); integer parts are
used as-is.  The resulting tuple becomes the ``spawn_key`` of a
``numpy.random.SeedSequence`` with the master seed as entropy, which
seeds a counter-based Philox generator.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream"]

_MAX_SEED = (1 << 64) - 1


def _part_key(part: int | str) -> int:
    if isinstance(part, bool):
        raise TypeError("stream id parts must be non-negative integers or strings")
    if isinstance(part, int):
        if part < 0:
            raise ValueError("integer stream id parts must be non-negative")
        return part
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big")
    raise TypeError("stream id parts must be non-negative integers or strings")


def substream(master_seed: int, *parts: int | str) -> np.random.Generator:
    """Return an independent random stream for the given id path.

    Streams with distinct ``parts`` tuples are statistically independent,
    and the same tuple always reproduces the identical stream.
    """
    if isinstance(master_seed, bool) or not isinstance(master_seed, int):
        raise TypeError("master seed must be an integer")
    if not 0 <= master_seed <= _MAX_SEED:
        raise ValueError("master seed must lie in [0, 2**64)")
    spawn_key = tuple(_part_key(p) for p in parts)
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(seq))
