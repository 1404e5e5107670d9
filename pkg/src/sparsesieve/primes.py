"""Segmented sieve prime table with von Mangoldt support and a binary cache.

The table stores a packed primality bitset up to x_max plus the list of
proper prime powers p^e (e >= 2), which together give exact Lambda values:
Lambda(n) = log p on prime powers, 0 elsewhere.
"""

from __future__ import annotations

import math
import os
import struct

import numpy as np

from .arith import integer_nth_floor_root
from .errors import CapacityError, ValidationError

PRIME_TABLE_BUDGET = 10**9
SEGMENT = 1 << 22
_MAGIC = b"SSPT"
_VERSION = 1

# classical checkpoint used by the self-test
PI_10_6 = 78498


def _simple_sieve(limit: int) -> np.ndarray:
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p:: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


class PrimeTable:
    """Immutable after construction; all queries are read-only."""

    def __init__(self, x_max: int, packed_bits: np.ndarray):
        self.x_max = int(x_max)
        self._bits = packed_bits              # packbits of is_prime[0..x_max]
        self._primes = None
        self._prime_powers = None

    @classmethod
    def build(cls, x: int) -> "PrimeTable":
        if x < 0:
            raise ValidationError(f"need x >= 0, got {x}")
        if x > PRIME_TABLE_BUDGET:
            raise CapacityError(f"x={x} exceeds the prime table budget {PRIME_TABLE_BUDGET}")
        if x < 4:
            is_p = np.zeros(x + 1, dtype=bool)
            for p in (2, 3):
                if p <= x:
                    is_p[p] = True
            return cls(x, np.packbits(is_p))
        base = _simple_sieve(math.isqrt(x))
        chunks = []
        for lo in range(0, x + 1, SEGMENT):
            hi = min(lo + SEGMENT, x + 1)
            seg = np.ones(hi - lo, dtype=bool)
            if lo == 0:
                seg[:2] = False
            for p in base:
                start = max(p * p, ((lo + p - 1) // p) * p)
                if start < hi:
                    seg[start - lo:: p] = False
            chunks.append(seg)
        return cls(x, np.packbits(np.concatenate(chunks)))

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            bits = np.unpackbits(self._bits, count=self.x_max + 1)
            self._primes = np.flatnonzero(bits).astype(np.int64)
        return self._primes

    def primes_upto(self, x: int) -> np.ndarray:
        if x > self.x_max:
            raise ValidationError(f"x={x} beyond table range {self.x_max}")
        p = self.primes
        return p[: int(np.searchsorted(p, x, side="right"))]

    def prime_count(self, x=None) -> int:
        return int(len(self.primes_upto(self.x_max if x is None else x)))

    def is_prime(self, n: int) -> bool:
        if n < 0 or n > self.x_max:
            raise ValidationError(f"n={n} beyond table range {self.x_max}")
        return bool((self._bits[n >> 3] >> (7 - (n & 7))) & 1)

    def prime_powers(self) -> list:
        """All (p^e, p) with e >= 2 and p^e <= x_max, ascending in p^e."""
        if self._prime_powers is None:
            out = []
            for p in _simple_sieve(math.isqrt(self.x_max)) if self.x_max >= 4 else []:
                v = int(p) * int(p)
                while v <= self.x_max:
                    out.append((v, int(p)))
                    v *= int(p)
            out.sort()
            self._prime_powers = out
        return self._prime_powers

    def mangoldt(self, n: int) -> float:
        """Lambda(n): log p if n = p^e, else 0."""
        if n < 1:
            raise ValidationError(f"need n >= 1, got {n}")
        if self.is_prime(n):
            return math.log(n)
        for e in range(2, n.bit_length() + 1):
            r = integer_nth_floor_root(n, e)
            if r >= 2 and r**e == n and self.is_prime(r):
                return math.log(r)
        return 0.0

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<IQ", _VERSION, self.x_max))
            fh.write(self._bits.tobytes())

    @classmethod
    def load(cls, path) -> "PrimeTable":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _MAGIC:
                raise ValidationError(f"not a prime table cache: {path}")
            version, x_max = struct.unpack("<IQ", fh.read(12))
            if version != _VERSION:
                raise ValidationError(f"cache version {version} != {_VERSION}")
            bits = np.frombuffer(fh.read(), dtype=np.uint8)
        return cls(int(x_max), bits.copy())

    @classmethod
    def cached(cls, x: int, cache_dir=None) -> "PrimeTable":
        """Build-or-load keyed by x; the cache file name carries x_max."""
        if cache_dir is None:
            return cls.build(x)
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"prime_table_{x}_v{_VERSION}.bin")
        if os.path.exists(path):
            return cls.load(path)
        table = cls.build(x)
        table.save(path)
        return table
