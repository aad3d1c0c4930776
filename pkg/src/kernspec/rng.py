"""Deterministic random-stream construction.

Every stochastic routine in this package derives its randomness from a
``numpy.random.Generator`` backed by the Philox 4x64 counter-based bit
generator.  Streams are keyed by a 64-bit mix of integer words (for a
Monte Carlo run: base seed, sample size, bandwidth index, replication
index), so each replication owns an independent, reproducible stream
that does not depend on scheduling or worker count.

The mixing recipe is frozen across releases:

* one word: ``splitmix64(word)``;
* several words: fold left with ``acc = splitmix64(acc XOR word)``
  starting from ``acc = 0``,

where ``splitmix64`` is the standard finalizer (add the golden-ratio
increment 0x9E3779B97F4A7C15, then xor-shift/multiply with the constants
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """One splitmix64 step: mix a 64-bit word into a well-spread word."""
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64(*words: int) -> int:
    """Fold integer words into a single 64-bit stream key.

    Negative inputs are reduced modulo 2**64 first.  The fold is
    order-sensitive: ``mix64(a, b) != mix64(b, a)`` in general.
    """
    acc = 0
    for w in words:
        acc = splitmix64((acc ^ (int(w) & MASK64)) & MASK64)
    return acc


def make_generator(*words: int) -> np.random.Generator:
    """Philox generator keyed by ``mix64(*words)``."""
    return np.random.Generator(np.random.Philox(key=mix64(*words)))


def as_generator(seed) -> np.random.Generator:
    """Accept an integer seed or a ready generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return make_generator(int(seed))
