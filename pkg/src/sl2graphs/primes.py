"""Prime lists for experiment grids."""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError


def sieve(limit: int) -> np.ndarray:
    """All primes <= limit (Eratosthenes on odd numbers)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    odd = np.ones((limit - 1) // 2, dtype=bool)  # odd[i] <-> 2i + 3
    for i in range((math.isqrt(limit) - 1) // 2):
        if odd[i]:
            q = 2 * i + 3
            odd[(q * q - 3) // 2::q] = False
    return np.concatenate(([2], 2 * np.flatnonzero(odd) + 3)).astype(np.int64)


def _upper_bound(n: int) -> int:
    # Rosser's bound p_n < n (ln n + ln ln n) for n >= 6
    if n < 6:
        return 15
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def nth_prime(n: int) -> int:
    """The n-th prime, 1-indexed (nth_prime(1) == 2)."""
    if n < 1:
        raise ConfigError("prime index starts at 1")
    return int(sieve(_upper_bound(n))[n - 1])


def nth_range(start: int, stop: int) -> list[int]:
    """Primes with index start .. stop-1 (left end inclusive), so
    ``nth_range(500, 600)`` is the 100 primes from 3571 on."""
    if not 1 <= start < stop:
        raise ConfigError("need 1 <= start < stop")
    return [int(p) for p in sieve(_upper_bound(stop))[start - 1:stop - 1]]


def primes_between(lo: int, hi: int) -> list[int]:
    return [int(p) for p in sieve(hi) if p >= lo]
