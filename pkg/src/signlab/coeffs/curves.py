"""Traces of Frobenius for elliptic curves over prime fields.

Small primes are handled by enumerating ``x`` against a table of squares.
Above ``BSGS_THRESHOLD`` the group order is pinned down inside the Hasse
interval by baby-step/giant-step on random points of the curve and of its
quadratic twist (Mestre's trick): every point cuts the candidate set down to
the orders it is compatible with, and we stop once one candidate remains.
The answer is exact; randomness only affects running time.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import isqrt

import numpy as np

from ..errors import BadReductionError, ConfigError
from ..primes import is_prime

BSGS_THRESHOLD = 2000


@dataclass(frozen=True)
class EllipticCurve:
    """Long Weierstrass model ``y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6``."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ConfigError(f"singular Weierstrass model {self.ainvs}")

    @classmethod
    def from_ainvs(cls, ainvs) -> "EllipticCurve":
        return cls(*(int(a) for a in ainvs))

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return self.a1 * self.a3 + 2 * self.a4

    @property
    def b6(self) -> int:
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def has_good_reduction(self, p: int) -> bool:
        return self.discriminant % p != 0


# -- enumeration -----------------------------------------------------------


def count_points_enumerate(E: EllipticCurve, p: int) -> int:
    """``#E(F_p)`` including the point at infinity, by direct enumeration.

    Also valid for bad ``p``: the singular point of the reduction is counted.
    """
    if p == 2:
        a1, a2, a3, a4, a6 = (c % 2 for c in E.ainvs)
        affine = sum(
            1
            for x in range(2)
            for y in range(2)
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % 2 == 0
        )
        return affine + 1
    # odd p: (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    x = np.arange(p, dtype=np.int64)
    b2, b4, b6 = E.b2 % p, E.b4 % p, E.b6 % p
    rhs = 4 * x % p
    rhs = (rhs + b2) % p * x % p
    rhs = (rhs + 2 * b4) % p * x % p
    rhs = (rhs + b6) % p
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    return p + 1 + int(chi[rhs].sum())


# -- baby-step / giant-step ----------------------------------------------


def _sqrt_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 1, t * t % p
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _mul(n, P, A, p):
    R = None
    while n:
        if n & 1:
            R = _add(R, P, A, p)
        P = _add(P, P, A, p)
        n >>= 1
    return R


def _neg(P, p):
    return None if P is None else (P[0], (-P[1]) % p)


def _annihilators(P, lo, hi, A, p) -> set[int]:
    """All ``N`` in ``[lo, hi]`` with ``N P = O``."""
    width = hi - lo
    m = isqrt(width) + 1
    baby = {}
    R = None
    for j in range(m):
        if j and R is None:
            # ord(P) = j < m
            return {N for N in range(lo, hi + 1) if N % j == 0}
        baby[R] = j
        R = _add(R, P, A, p)
    neg_step = _neg(_mul(m, P, A, p), p)
    T = _neg(_mul(lo, P, A, p), p)
    found = set()
    g = 0
    while g * m <= width:
        j = baby.get(T)
        if j is not None and g * m + j <= width:
            found.add(lo + g * m + j)
        T = _add(T, neg_step, A, p)
        g += 1
    return found


def _random_point(A, B, p, rng):
    while True:
        x = rng.randrange(p)
        f = (x * x * x + A * x + B) % p
        if f == 0:
            return (x, 0)
        if pow(f, (p - 1) // 2, p) == 1:
            return (x, _sqrt_mod(f, p))


def count_points_bsgs(E: EllipticCurve, p: int, max_rounds: int = 64) -> int:
    """Exact ``#E(F_p)`` for good ``p > 3`` via baby-step/giant-step."""
    if p <= 3:
        raise ConfigError("baby-step/giant-step counting needs p > 3")
    A = (-27 * E.c4) % p
    B = (-54 * E.c6) % p
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    At, Bt = A * d * d % p, B * d * d * d % p
    r = isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    candidates = set(range(lo, hi + 1))
    rng = random.Random(p)
    for rnd in range(max_rounds):
        if rnd % 2 == 0:
            P = _random_point(A, B, p, rng)
            if len(candidates) <= 4:
                candidates = {N for N in candidates if _mul(N, P, A, p) is None}
            else:
                candidates &= _annihilators(P, lo, hi, A, p)
        else:
            Q = _random_point(At, Bt, p, rng)
            if len(candidates) <= 4:
                candidates = {N for N in candidates if _mul(2 * p + 2 - N, Q, At, p) is None}
            else:
                candidates &= {2 * p + 2 - N for N in _annihilators(Q, lo, hi, At, p)}
        if len(candidates) == 1:
            return candidates.pop()
    return count_points_enumerate(E, p)


# -- public ------------------------------------------------------------------


def ec_ap(E: EllipticCurve, p: int, method: str = "auto") -> int:
    """Trace of Frobenius ``a_p = p + 1 - #E(F_p)`` at a prime of good reduction."""
    if not is_prime(p):
        raise ConfigError(f"{p} is not prime")
    if not E.has_good_reduction(p):
        raise BadReductionError(f"{E.ainvs} has bad reduction at {p}; supply a_p separately")
    if method == "auto":
        method = "bsgs" if p > BSGS_THRESHOLD else "enumerate"
    if method == "enumerate":
        n = count_points_enumerate(E, p)
    elif method == "bsgs":
        n = count_points_bsgs(E, p)
    else:
        raise ConfigError(f"unknown point-counting method {method!r}")
    return p + 1 - n


def ec_bad_ap(E: EllipticCurve, p: int) -> int:
    """``p + 1 - #E~(F_p)`` on the singular reduction of a minimal model.

    This is ``+1`` (split multiplicative), ``-1`` (non-split) or ``0``
    (additive), matching the newform's coefficient at ``p``.
    """
    if E.has_good_reduction(p):
        raise ConfigError(f"{p} is a prime of good reduction")
    return p + 1 - count_points_enumerate(E, p)


def _ap_chunk(args):
    ainvs, primes = args
    E = EllipticCurve.from_ainvs(ainvs)
    return [ec_ap(E, int(p)) for p in primes]


def ec_ap_table(E: EllipticCurve, primes, workers: int = 1) -> dict[int, int]:
    """``{p: a_p}`` over the good primes in ``primes``."""
    good = [int(p) for p in primes if E.has_good_reduction(int(p))]
    if workers <= 1 or len(good) < 2000:
        return {p: ec_ap(E, p) for p in good}
    chunks = [good[i::workers] for i in range(workers)]
    out: dict[int, int] = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk, values in zip(chunks, pool.map(_ap_chunk, [(E.ainvs, c) for c in chunks])):
            out.update(zip(chunk, values))
    return dict(sorted(out.items()))
