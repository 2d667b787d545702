"""Prime sieving helpers shared by the coefficient and statistics code."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np


_SMALL = 1 << 21


@lru_cache(maxsize=8)
def _sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    flags.setflags(write=False)
    return flags


def primes_upto(n: int) -> np.ndarray:
    """All primes ``p <= n`` as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(_sieve(int(n))).astype(np.int64)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= _SMALL:
        return bool(_sieve(_SMALL)[n])
    if n % 2 == 0:
        return False
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
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


@lru_cache(maxsize=4)
def smallest_prime_factor(n: int) -> np.ndarray:
    """Smallest-prime-factor table ``spf[m]`` for ``0 <= m <= n``."""
    spf = np.arange(n + 1, dtype=np.int64)
    for p in range(2, isqrt(n) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            mask = block == np.arange(p * p, n + 1, p)
            block[mask] = p
    spf.setflags(write=False)
    return spf


def factor(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, sorted by prime."""
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factor(abs(n))] if n else []


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
