"""Prime-field arithmetic, primality testing, and prime sampling.

Field values are plain Python integers reduced into [0, q), so the hot paths
elsewhere stay allocation-free; FieldElem wraps a value with operator support
for callers that prefer working with elements directly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator

# Witness set proven deterministic for all n < 3.317e24 (covers 2^64).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
_MR_RANDOM_ROUNDS = 64

_entropy = random.SystemRandom()


def _strong_probable_prime(n: int, a: int, d: int, r: int) -> bool:
    """True when base `a` fails to witness compositeness of n = 2^r * d + 1."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(m: int) -> bool:
    """Miller-Rabin primality test.

    Deterministic below ~3.3e24 via a fixed witness set; above that, 64
    random rounds, so a composite passes with probability below 2^-64.
    """
    if m < 2:
        return False
    for p in _MR_WITNESSES:
        if m == p:
            return True
        if m % p == 0:
            return False
    d = m - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if m < _MR_DETERMINISTIC_LIMIT:
        witnesses: tuple[int, ...] | list[int] = _MR_WITNESSES
    else:
        witnesses = [_entropy.randrange(2, m - 1) for _ in range(_MR_RANDOM_ROUNDS)]
    return all(_strong_probable_prime(m, a, d, r) for a in witnesses)


def least_prime_geq(x) -> int:
    """Smallest prime p with p >= x.  Accepts int, float, or Fraction."""
    n = math.ceil(x)
    if n <= 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


def primes_in_range(lo, hi) -> list[int]:
    """All primes in [lo, hi], ascending.  Endpoints may be non-integral."""
    lo_i = max(2, math.ceil(lo))
    hi_i = math.floor(hi)
    return [m for m in range(lo_i, hi_i + 1) if is_prime(m)]


def sample_prime_in(lo, hi, rng: random.Random) -> int:
    """Uniform prime from [lo, hi] by integer rejection sampling.

    Drawing uniform integers and keeping primes makes the result exactly
    uniform over the primes in range.  Raises ValueError when the range
    contains no prime.
    """
    lo_i = math.ceil(lo)
    hi_i = math.floor(hi)
    if hi_i < lo_i or least_prime_geq(max(2, lo_i)) > hi_i:
        raise ValueError(f"no prime in [{lo}, {hi}]")
    while True:
        cand = rng.randint(lo_i, hi_i)
        if is_prime(cand):
            return cand


class PrimeField:
    """The field of integers modulo a prime q."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        if q < 2 or not is_prime(q):
            raise ValueError(f"field modulus must be prime, got {q}")
        self.q = q

    def reduce(self, v: int) -> int:
        return v % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError(f"inverse of zero in F_{self.q}")
        return pow(a, -1, self.q)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.q)
        return pow(a, e, self.q)

    def elem(self, v: int) -> "FieldElem":
        return FieldElem(self, v % self.q)

    def rand(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def rand_nonzero(self, rng: random.Random) -> int:
        return rng.randrange(1, self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and self.q == other.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __reduce__(self):
        return (PrimeField, (self.q,))

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"


@dataclass(frozen=True)
class FieldElem:
    """A value in [0, q) tied to its PrimeField."""

    field: PrimeField
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"value {self.value} not reduced mod {self.field.q}")

    def _peer(self, other: "FieldElem") -> None:
        if self.field != other.field:
            raise ValueError("field elements from different fields")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._peer(other)
        return FieldElem(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        self._peer(other)
        return FieldElem(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._peer(other)
        return FieldElem(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        self._peer(other)
        return FieldElem(self.field, self.field.mul(self.value, self.field.inv(other.value)))

    def __neg__(self) -> "FieldElem":
        return FieldElem(self.field, self.field.neg(self.value))

    def __pow__(self, e: int) -> "FieldElem":
        return FieldElem(self.field, self.field.pow(self.value, e))

    def inv(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value}"


def field_range(field: PrimeField) -> Iterator[int]:
    """Iterate the canonical representatives 0..q-1 (small fields only)."""
    return iter(range(field.q))
