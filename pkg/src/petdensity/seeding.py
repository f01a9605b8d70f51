"""Seeded substreams.

All randomness flows from 64-bit seeds through numpy's ``SeedSequence``
with a ``spawn_key``, feeding a PCG64 generator:

* a sample of size n with seed ``s`` is generated in blocks of
  ``BLOCK_SIZE`` observations; block ``b`` draws from
  ``SeedSequence(s, spawn_key=(b,))``. Blocks are independent, so they can
  be generated in any order (or in parallel) with identical output.
* experiment drivers expand a master seed into per-(n, replication) sample
  seeds with :func:`derive_seed`.
"""

from __future__ import annotations

import numpy as np

from petdensity.errors import DomainError

BLOCK_SIZE = 4096

_U64 = (1 << 64) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _U64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def block_generator(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master_seed: int, *keys: int) -> int:
    """Child u64 seed for ``keys`` (e.g. ``(n, replication)``)."""
    ss = np.random.SeedSequence(check_seed(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
