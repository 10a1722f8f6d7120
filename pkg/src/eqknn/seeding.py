"""Seeded randomness shared by fold generation, sampling and the harness.

Generators are ``numpy.random.PCG64`` seeded with a 64-bit integer.  Child
seeds are derived by position, never by call order::

    derive_seed(root, *keys) = SeedSequence([root mod 2**64, *keys]).generate_state(1, uint64)[0]

so any work unit can be recomputed in isolation, in any order, on any
number of workers.
"""
from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def derive_seed(root: int, *keys: int) -> int:
    entropy = [int(root) & _MASK64] + [int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
