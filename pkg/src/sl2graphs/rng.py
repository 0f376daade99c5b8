"""Seeded random streams.

All randomness goes through :func:`stream`, a Philox-4x64 counter-based
generator (numpy's ``Philox``) keyed by ``(seed, p, trial)``:

    key[0] = seed mod 2**64
    key[1] = (p mod 2**32) << 32 | (trial mod 2**32)
    counter = 0

Integers are drawn with ``Generator.integers`` (Lemire's bounded method on
the 64-bit output), so a stream is a pure function of the triple and
independent trials never share state.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1


def stream(seed: int, p: int = 0, trial: int = 0) -> np.random.Generator:
    key = np.array(
        [int(seed) & _MASK64, ((int(p) & _MASK32) << 32) | (int(trial) & _MASK32)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
