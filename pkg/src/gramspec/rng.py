"""Deterministic random-stream helpers.

Every stochastic routine derives its generator from a 64-bit master seed
plus a tuple of nonnegative integers naming the substream.  Streams named
this way are independent of each other and of the number of workers, which
is what makes reruns bitwise reproducible.
"""

from __future__ import annotations

import numpy as np

# Substream namespaces; first path element after the seed.  Keeping them in
# one place guarantees two modules never share a stream.
NS_POINTS = 0
NS_TRIAL = 1
NS_ORACLE = 2
NS_DECAY = 3
NS_NYSTROM = 4
NS_SAMPLER = 5
NS_WALKS = 6


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for the substream named by ``path`` under ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Derive a child 64-bit seed, for handing to APIs that take plain seeds."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
