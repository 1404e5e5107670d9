"""Small exact-integer number theory helpers (trial division scale).

Everything here is deterministic and exact; factorization is plain trial
division, which is all the desk-scale moduli (<= 10^12) require.
"""

from __future__ import annotations

import math

from .errors import CapacityError

FACTOR_BUDGET = 10**12  # trial division cap for moduli


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: exponent} of n >= 1 by trial division."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    if n > FACTOR_BUDGET:
        raise CapacityError(f"factorization budget exceeded: n={n} > {FACTOR_BUDGET}")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    # wheel over 6k +- 1
    p = 5
    while p * p <= m:
        for q in (p, p + 2):
            while m % q == 0:
                out[q] = out.get(q, 0) + 1
                m //= q
        p += 6
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def euler_phi(n: int) -> int:
    """Euler totient of n >= 1."""
    phi = 1
    for p, e in factorize(n).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def mobius(n: int) -> int:
    """Mobius function mu(n)."""
    mu = 1
    for _, e in factorize(n).items():
        if e > 1:
            return 0
        mu = -mu
    return mu


def divisors(n: int) -> list[int]:
    """All positive divisors of n, sorted ascending."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def coprime_residues(m: int) -> list[int]:
    """Residues a in [1, m] with gcd(a, m) = 1.

    For m = 1 this is [1] (the single residue class), matching the convention
    that the a = m term is kept exactly when m = 1.
    """
    if m == 1:
        return [1]
    return [a for a in range(1, m) if math.gcd(a, m) == 1]


def integer_nth_floor_root(x: int, q: int) -> int:
    """Largest m >= 0 with m**q <= x, exact for arbitrary-size integers."""
    if x < 0 or q < 1:
        raise ValueError("need x >= 0 and q >= 1")
    if q == 1:
        return x
    if q == 2:
        return math.isqrt(x)
    m = int(round(x ** (1.0 / q))) if x < 2**52 else 1 << ((x.bit_length() + q - 1) // q)
    while m > 0 and m**q > x:
        m -= 1
    while (m + 1) ** q <= x:
        m += 1
    return m
