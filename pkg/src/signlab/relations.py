"""Detecting rational linear relations among ``1, theta_i(p), theta_j(p)``.

A relation ``m theta_i +- n theta_j = r/s`` forces
``cos(2 pi m q theta_i) = cos(2 pi n q theta_j)`` for ``s | q``, i.e.
``T_{mq}(x_i) = T_{nq}(x_j)`` with ``x = a(p) / (2 p^((k-1)/2))``.  For even
degree ``T`` only involves ``x^2 = a(p)^2 / (4 p^(k-1))``, which is rational,
so the identity is checked in exact arithmetic.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import mpmath

from .coeffs import CoeffTable
from .errors import ConfigError, DataError, PrecisionBudgetError
from .lattice import lll_reduce
from .satake import angle_mp

EXTENDED_BITS = 96


class InadmissibleSampleWarning(UserWarning):
    """A sample was skipped because one of its angles is rational or its valuation is inadmissible."""

MAX_DEGREE = 4096


@dataclass(frozen=True)
class ChebyshevPoly:
    """``T_n`` with integer coefficients ``coeffs[r]`` of ``x^r``."""

    degree: int
    coeffs: tuple[int, ...]

    def __call__(self, x):
        acc = 0 * x + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    @property
    def leading(self) -> int:
        return self.coeffs[-1]


@lru_cache(maxsize=512)
def chebyshev(n: int) -> ChebyshevPoly:
    """``T_n`` from ``T_{n+1} = 2x T_n - T_{n-1}``."""
    if n < 0:
        raise ConfigError("Chebyshev degree must be >= 0")
    if n == 0:
        return ChebyshevPoly(0, (1,))
    if n == 1:
        return ChebyshevPoly(1, (0, 1))
    prev, cur = chebyshev(n - 2).coeffs, chebyshev(n - 1).coeffs
    nxt = [0] * (n + 1)
    for r, c in enumerate(cur):
        nxt[r + 1] += 2 * c
    for r, c in enumerate(prev):
        nxt[r] -= c
    return ChebyshevPoly(n, tuple(nxt))


def _even_chebyshev_at(n: int, y_num: int, y_den: int) -> Fraction:
    """``T_n(x)`` as an exact fraction, ``n`` even, given ``x^2 = y_num / y_den``."""
    c = chebyshev(n).coeffs[0::2]  # c_r is the coefficient of x^(2r)
    R = len(c) - 1
    # sum_r c_r y^r = (sum_r c_r y_num^r y_den^(R-r)) / y_den^R, homogeneous Horner
    acc = c[R]
    zpow = 1
    for r in range(R - 1, -1, -1):
        zpow *= y_den
        acc = acc * y_num + c[r] * zpow
    return Fraction(acc, y_den**R)


def identity_residual(a_i: int, a_j: int, p: int, k: int, m: int, n: int, q: int, max_degree: int = MAX_DEGREE) -> Fraction:
    """``|T_{mq}(x_i) - T_{nq}(x_j)|`` exactly; ``q`` must be even."""
    if q < 1 or q % 2:
        raise ConfigError("q must be a positive even integer")
    if m < 0 or n < 0:
        raise ConfigError("m, n must be non-negative")
    if max(m, n) * q > max_degree:
        raise PrecisionBudgetError(f"degree {max(m, n) * q} exceeds budget {max_degree}")
    den = 4 * p ** (k - 1)
    lhs = _even_chebyshev_at(m * q, int(a_i) ** 2, den)
    rhs = _even_chebyshev_at(n * q, int(a_j) ** 2, den)
    return abs(lhs - rhs)


def _to_mpf(x: Fraction, prec: int = EXTENDED_BITS + 32) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.mpf(x.numerator) / x.denominator


def chebyshev_identity_residual(
    t_i: CoeffTable, t_j: CoeffTable, p: int, m: int, n: int, q: int, max_degree: int = MAX_DEGREE
) -> mpmath.mpf:
    """Residual of ``T_{mq}(x_i) = T_{nq}(x_j)`` at ``p`` for two tables."""
    if t_i.weight != t_j.weight:
        raise ConfigError("both forms must have the same weight")
    if t_i.level % p == 0 or t_j.level % p == 0:
        raise ConfigError(f"{p} is a bad prime for one of the forms")
    res = identity_residual(t_i[p], t_j[p], p, t_i.weight, m, n, q, max_degree)
    return _to_mpf(res)


def valuation_filter(a_p: int, p: int, k: int) -> tuple[int, bool]:
    """``(v_p(a_p), v <= k/2 - 1)``.

    For ``p >= 5`` an inadmissible valuation is impossible for a genuine
    newform with rational coefficients, so it is reported as corrupt data.
    """
    a_p = int(a_p)
    if a_p == 0:
        raise DataError("a_p = 0 has infinite valuation; treat theta = 1/4 separately")
    v = 0
    while a_p % p == 0:
        a_p //= p
        v += 1
    ok = v <= k // 2 - 1
    if not ok and p >= 5:
        warnings.warn(f"v_{p}(a_p) = {v} > k/2 - 1 = {k // 2 - 1}: coefficient data looks corrupt", stacklevel=2)
    return v, ok


def candidate_space(k: int) -> frozenset[tuple[int, int]]:
    """Coprime pairs of odd integers ``1 <= m, n < k``."""
    if k < 2:
        raise ConfigError("k must be >= 2")
    odd = range(1, k, 2)
    return frozenset((m, n) for m in odd for n in odd if gcd(m, n) == 1)


@dataclass(frozen=True)
class RelationCandidate:
    """``m theta_i + sign n theta_j`` rational with denominator dividing ``q``.

    ``n = 0`` (or ``m = 0``) records that ``theta_i`` (``theta_j``) is itself
    rational.
    """

    prime: int
    i: str
    j: str
    m: int
    n: int
    sign: str
    q: int
    residual: float


@dataclass(frozen=True)
class AnglePair:
    prime: int
    weight: int
    i: str
    j: str
    a_i: int
    a_j: int


def angle_pairs(t_i: CoeffTable, t_j: CoeffTable, primes: Iterable[int]) -> list[AnglePair]:
    if t_i.weight != t_j.weight:
        raise ConfigError("both forms must have the same weight")
    return [AnglePair(int(p), t_i.weight, t_i.label, t_j.label, int(t_i[p]), int(t_j[p])) for p in primes]


def _candidate_from_vector(s: AnglePair, n0: int, n1: int, n2: int, Qp: int):
    if n1 == 0 and n2 == 0:
        return None
    g = gcd(abs(n1), abs(n2))
    m, n = abs(n1) // g, abs(n2) // g
    sign = "+" if n1 * n2 >= 0 else "-"
    q = Qp * g
    if q % 2:
        q *= 2
    return m, n, sign, q


def relation_scan(
    samples: Sequence[AnglePair],
    H: int = 50,
    Q: int = 12,
    tol: float = 1e-9,
    prec: int = 192,
    max_degree: int = MAX_DEGREE,
) -> list[RelationCandidate]:
    """Integer relations ``n0 + n1 Q' theta_i + n2 Q' theta_j ~ 0``, ``|n1|, |n2| <= H``, ``Q' <= Q``.

    Each ``Q'`` is one LLL reduction of a 3-dimensional embedding lattice.
    Every candidate is re-verified by :func:`identity_residual` in exact
    arithmetic; only those with residual ``<= tol`` are returned.  Samples
    failing :func:`is_admissible` are skipped with a warning.
    """
    if H < 1 or Q < 1 or tol <= 0:
        raise ConfigError("H, Q must be >= 1 and tol > 0")
    if prec < EXTENDED_BITS:
        raise ConfigError(f"relation scans need at least {EXTENDED_BITS} bits")
    scale_bits = prec - 64
    C = 1 << scale_bits
    out: list[RelationCandidate] = []
    for s in samples:
        if not is_admissible((s.a_i, s.a_j), s.prime, s.weight):
            warnings.warn(
                f"p={s.prime}: a_i={s.a_i}, a_j={s.a_j} inadmissible, skipped", InadmissibleSampleWarning, stacklevel=2
            )
            continue
        with mpmath.workprec(prec + 32):
            ti = angle_mp(s.a_i, s.prime, s.weight, prec)
            tj = angle_mp(s.a_j, s.prime, s.weight, prec)
            best: dict[tuple, RelationCandidate] = {}
            for Qp in range(1, Q + 1):
                xi = int(mpmath.nint(C * Qp * ti))
                xj = int(mpmath.nint(C * Qp * tj))
                basis = lll_reduce([[1, 0, 0, C], [0, 1, 0, xi], [0, 0, 1, xj]])
                for n0, n1, n2, r in basis:
                    if max(abs(n1), abs(n2)) > H:
                        continue
                    # cheap pre-filter; the exact residual check below decides
                    if abs(r) > C >> 20:
                        continue
                    cand = _candidate_from_vector(s, n0, n1, n2, Qp)
                    if cand is None:
                        continue
                    m, n, sign, q = cand
                    key = (m, n, sign)
                    if key in best and best[key].q <= q:
                        continue
                    if max(m, n) * q > max_degree:
                        continue
                    res = _to_mpf(identity_residual(s.a_i, s.a_j, s.prime, s.weight, m, n, q, max_degree))
                    if res <= tol:
                        best[key] = RelationCandidate(s.prime, s.i, s.j, m, n, sign, q, float(res))
        out.extend(best[key] for key in sorted(best))
    return out


def scan_report(prime: int, i: str, j: str, candidates: Sequence[RelationCandidate]) -> str:
    body = {
        "prime": prime,
        "i": i,
        "j": j,
        "candidates": [
            {k: v for k, v in asdict(c).items() if k in ("m", "n", "sign", "q", "residual")}
            for c in candidates
            if c.prime == prime
        ],
    }
    return json.dumps(body, sort_keys=True)


def is_admissible(a_values: Sequence[int], p: int, k: int) -> bool:
    """Non-zero coefficients with admissible valuations at ``p`` for every form."""
    for a in a_values:
        if a == 0:
            return False
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if not valuation_filter(a, p, k)[1]:
                return False
    return True


def admissible_primes(t_i: CoeffTable, t_j: CoeffTable, x: int) -> list[int]:
    """Good primes ``p <= x`` at which both forms pass :func:`is_admissible`."""
    from .primes import primes_upto

    t_i.require(x)
    t_j.require(x)
    return [
        p
        for p in primes_upto(x).tolist()
        if t_i.level % p and t_j.level % p and is_admissible((t_i[p], t_j[p]), p, t_i.weight)
    ]


def sample_admissible_primes(t_i: CoeffTable, t_j: CoeffTable, x: int, count: int, seed: int = 0) -> list[int]:
    """``count`` admissible primes ``<= x`` drawn without replacement by ``random.Random(seed)``, sorted."""
    import random

    pool = admissible_primes(t_i, t_j, x)
    if count > len(pool):
        raise ConfigError(f"only {len(pool)} admissible primes below {x}")
    return sorted(random.Random(seed).sample(pool, count))
