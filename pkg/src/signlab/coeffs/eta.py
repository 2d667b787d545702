"""Eta-product q-expansions.

``eta(z) = q^(1/24) * prod (1 - q^n)`` and Euler's pentagonal number theorem
makes ``prod (1 - q^n)`` a series with only ``O(sqrt(N))`` non-zero terms
below ``q^N``.  Powers of that sparse series are produced with the
J.C.P. Miller recurrence, which costs one pass over the sparse support per
output coefficient and works for negative exponents as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class EtaProduct:
    """``prod eta(m z)^e`` over ``factors = ((m, e), ...)``."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(m), int(e)) for m, e in self.factors))
        if not self.factors:
            raise ConfigError("eta product needs at least one factor")
        for m, e in self.factors:
            if m < 1 or e == 0:
                raise ConfigError(f"bad eta factor eta({m}z)^{e}")

    @property
    def weight(self) -> int:
        total = sum(e for _, e in self.factors)
        if total % 2:
            raise ConfigError("eta product has odd total exponent; half-integral weight unsupported")
        return total // 2

    @property
    def order_at_infinity_24(self) -> int:
        """``24`` times the leading exponent of the q-expansion."""
        return sum(m * e for m, e in self.factors)

    def check_level(self, level: int) -> None:
        for m, _ in self.factors:
            if level % m:
                raise ConfigError(f"eta factor level {m} does not divide {level}")


def pentagonal_terms(n_max: int) -> list[tuple[int, int]]:
    """Non-zero ``(exponent, sign)`` pairs of ``prod (1 - q^n)`` up to ``q^n_max``.

    Exponents are the generalized pentagonal numbers ``k(3k -+ 1)/2`` with
    sign ``(-1)^k``; the constant term is omitted.
    """
    out = []
    k = 1
    while True:
        first = k * (3 * k - 1) // 2
        if first > n_max:
            break
        sign = -1 if k % 2 else 1
        out.append((first, sign))
        second = k * (3 * k + 1) // 2
        if second <= n_max:
            out.append((second, sign))
        k += 1
    return out


@lru_cache(maxsize=16)
def euler_power(e: int, n_max: int) -> tuple[int, ...]:
    """Coefficients of ``prod_{n>=1} (1 - q^n)^e`` through ``q^n_max``."""
    terms = pentagonal_terms(n_max)
    c = [0] * (n_max + 1)
    c[0] = 1
    e1 = e + 1
    for n in range(1, n_max + 1):
        acc = 0
        for k, s in terms:
            if k > n:
                break
            w = e1 * k - n
            if s > 0:
                acc += w * c[n - k]
            else:
                acc -= w * c[n - k]
        q, r = divmod(acc, n)
        if r:
            raise ArithmeticError("non-integral Miller recurrence step")
        c[n] = q
    return tuple(c)


def _mul_sparse(dense: np.ndarray, sparse: list[tuple[int, int]], n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1, dtype=object)
    for j, cj in sparse:
        if cj:
            out[j:] += cj * dense[: n_max + 1 - j]
    return out


def eta_expand(product: EtaProduct, B: int) -> list[int]:
    """q-expansion coefficients ``[a(1), ..., a(B)]`` of a holomorphic eta product."""
    if B < 1:
        raise ConfigError("bound must be positive")
    lead24 = product.order_at_infinity_24
    if lead24 % 24 or lead24 <= 0:
        raise ConfigError(
            f"leading exponent {lead24}/24 is not a positive integer; not a cusp form at infinity"
        )
    lead = lead24 // 24
    n_max = B - lead
    if n_max < 0:
        return [0] * B

    factors = sorted(product.factors)
    series: np.ndarray | None = None
    for m, e in factors:
        base = euler_power(e, n_max // m)
        if series is None:
            series = np.zeros(n_max + 1, dtype=object)
            series[:: m][: len(base)] = base
            continue
        support = [(m * i, c) for i, c in enumerate(base) if c]
        series = _mul_sparse(series, support, n_max)

    coeffs = [0] * B
    for n in range(lead, B + 1):
        coeffs[n - 1] = int(series[n - lead])
    return coeffs
