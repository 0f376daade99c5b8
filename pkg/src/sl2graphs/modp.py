"""Exact arithmetic in GF(p) and SL2(Z/pZ).

Scalars and matrices carry their modulus; mixing moduli raises
:class:`~sl2graphs.errors.ModulusMismatch`.  Bulk routines at the bottom of
the module work on numpy ``int64`` arrays and are what the graph builders
use; the value classes are for the public API and for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    IndexOutOfRange,
    ModulusMismatch,
    NoRoot,
    NotInSL2,
    NotPrime,
    ZeroInverse,
)

MAX_MODULUS = 2**31


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_modulus(p: int) -> int:
    p = int(p)
    if p == 2 or not is_prime(p):
        raise NotPrime(f"modulus must be an odd prime, got {p}")
    if p >= MAX_MODULUS:
        raise NotPrime(f"modulus {p} exceeds the supported range (< 2**31)")
    return p


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(p); ``value`` is reduced into [0, p) on construction."""

    value: int
    p: int

    def __post_init__(self):
        check_modulus(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ModulusMismatch(f"{self.p} != {other.p}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        return FieldElement(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return FieldElement(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        return FieldElement(v - self.value, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        return FieldElement(self.value * v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        return self * field_inv(FieldElement(v, self.p))

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __pow__(self, e: int):
        if e < 0:
            return field_inv(self) ** (-e)
        return FieldElement(pow(self.value, e, self.p), self.p)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def field_inv(x: FieldElement) -> FieldElement:
    if x.value == 0:
        raise ZeroInverse(f"0 has no inverse mod {x.p}")
    return FieldElement(pow(x.value, x.p - 2, x.p), x.p)


def legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(x: FieldElement) -> FieldElement:
    """Tonelli-Shanks square root; returns the smaller of the two roots."""
    p, n = x.p, x.value
    if n == 0:
        return FieldElement(0, p)
    if legendre(n, p) != 1:
        raise NoRoot(f"{n} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(n, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(z, p) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return FieldElement(min(r, p - r), p)


def _prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=256)
def primitive_root(p: int) -> FieldElement:
    """Smallest generator of GF(p)^*."""
    check_modulus(p)
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return FieldElement(g, p)
    # p = 3 has the single candidate 2; the loop always returns for odd primes
    raise AssertionError("unreachable")


def power_table(base: int, p: int) -> np.ndarray:
    """``out[t] = base**t mod p`` for t in [0, p-1), by block doubling."""
    n = p - 1
    out = np.empty(n, dtype=np.int64)
    out[0] = 1
    filled = 1
    step = base % p  # base**filled
    while filled < n:
        m = min(filled, n - filled)
        out[filled:filled + m] = out[:m] * step % p
        filled += m
        step = step * step % p
    return out


@dataclass(frozen=True, eq=False)
class DlogTable:
    """Discrete logarithms to a primitive root.

    ``table[v]`` is the exponent of ``v`` for v in [1, p); ``table[0]`` is -1.
    ``powers[t]`` is ``base**t``.
    """

    base: FieldElement
    table: np.ndarray
    powers: np.ndarray

    @classmethod
    def build(cls, p: int) -> "DlogTable":
        g = primitive_root(p)
        powers = power_table(g.value, p)
        table = np.full(p, -1, dtype=np.int64)
        table[powers] = np.arange(p - 1, dtype=np.int64)
        powers.setflags(write=False)
        table.setflags(write=False)
        return cls(g, table, powers)

    @property
    def p(self) -> int:
        return self.base.p

    def log(self, v) -> int:
        v = int(v) % self.p
        if v == 0:
            raise ZeroInverse("log of 0")
        return int(self.table[v])


def inverse_table(p: int) -> np.ndarray:
    """``inv[x] = x**-1 mod p`` for x in [1, p); ``inv[0] = 0``."""
    g = primitive_root(p).value
    powers = power_table(g, p)
    inv = np.zeros(p, dtype=np.int64)
    # (g^t)^-1 = g^(p-1-t)
    inv[powers] = np.roll(powers[::-1], 1)
    return inv


@dataclass(frozen=True)
class SL2Element:
    """A 2x2 matrix ``[[a, b], [c, d]]`` over GF(p) with determinant 1."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        p = check_modulus(self.p)
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % p)
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise NotInSL2(f"determinant of {self.entries} is not 1 mod {p}")

    @classmethod
    def identity(cls, p: int) -> "SL2Element":
        return cls(1, 0, 0, 1, p)

    @classmethod
    def from_rows(cls, rows, p: int) -> "SL2Element":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d), p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def field(self, name: str) -> FieldElement:
        return FieldElement(getattr(self, name), self.p)

    def __matmul__(self, other: "SL2Element") -> "SL2Element":
        return sl2_mul(self, other)

    def __neg__(self):
        return SL2Element(-self.a, -self.b, -self.c, -self.d, self.p)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] (mod {self.p})"


def sl2_mul(g: SL2Element, h: SL2Element) -> SL2Element:
    if g.p != h.p:
        raise ModulusMismatch(f"{g.p} != {h.p}")
    p = g.p
    return SL2Element(
        (g.a * h.a + g.b * h.c) % p,
        (g.a * h.b + g.b * h.d) % p,
        (g.c * h.a + g.d * h.c) % p,
        (g.c * h.b + g.d * h.d) % p,
        p,
    )


def sl2_inv(g: SL2Element) -> SL2Element:
    return SL2Element(g.d, -g.b, -g.c, g.a, g.p)


def sl2_order(p: int) -> int:
    return p**3 - p


# Dense indexing of SL2(Z/pZ):
#   a != 0: (a, b, c) free, d = (1 + bc)/a -> ((a-1)*p + b)*p + c   in [0, (p-1)p^2)
#   a == 0: b != 0, c = -1/b, d free      -> (p-1)p^2 + (b-1)*p + d
# The identity maps to 0.

def sl2_index(g: SL2Element) -> int:
    p = g.p
    if g.a != 0:
        return ((g.a - 1) * p + g.b) * p + g.c
    return (p - 1) * p * p + (g.b - 1) * p + g.d


def sl2_unindex(i: int, p: int) -> SL2Element:
    check_modulus(p)
    i = int(i)
    if not 0 <= i < p**3 - p:
        raise IndexOutOfRange(f"{i} not in [0, {p**3 - p})")
    split = (p - 1) * p * p
    if i < split:
        a, rest = divmod(i, p * p)
        a += 1
        b, c = divmod(rest, p)
        d = (1 + b * c) * pow(a, p - 2, p) % p
        return SL2Element(a, b, c, d, p)
    b, d = divmod(i - split, p)
    b += 1
    c = -pow(b, p - 2, p) % p
    return SL2Element(0, b, c, d, p)


def sl2_index_array(a, b, c, d, p: int) -> np.ndarray:
    """Vectorized :func:`sl2_index`; entries must already be reduced."""
    split = (p - 1) * p * p
    nonzero = ((a - 1) * p + b) * p + c
    zero = split + (b - 1) * p + d
    return np.where(a != 0, nonzero, zero)


def sl2_unindex_array(idx: np.ndarray, p: int, inv: np.ndarray):
    """Vectorized :func:`sl2_unindex`; ``inv`` from :func:`inverse_table`."""
    idx = np.asarray(idx, dtype=np.int64)
    split = (p - 1) * p * p
    top = idx < split
    a = np.where(top, idx // (p * p) + 1, 0)
    r = np.where(top, idx % (p * p), idx - split)
    hi, lo = r // p, r % p
    b = np.where(top, hi, hi + 1)
    c = np.where(top, lo, (p - inv[np.where(top, 1, b)]) % p)
    d = np.where(top, (1 + hi * lo % p) % p * inv[a] % p, lo)
    return a, b, c, d
