"""Coefficient tables and the operations that derive new tables from old."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, isqrt, lcm
from numbers import Integral, Real
from typing import Mapping, Sequence, Union

import numpy as np

from ..errors import BoundError, ConfigError, MissingCoefficientError
from ..primes import primes_upto, smallest_prime_factor
from .curves import EllipticCurve
from .eta import EtaProduct, eta_expand


@dataclass(frozen=True)
class FixtureSource:
    """Coefficients read from a fixture or cache file."""

    path: str


Generator = Union[EtaProduct, EllipticCurve, FixtureSource, None]


@dataclass(frozen=True)
class FormSpec:
    level: int
    weight: int
    label: str
    generator: Generator = None

    def __post_init__(self):
        if self.level < 1:
            raise ConfigError(f"level must be positive, got {self.level}")
        if self.weight < 2 or self.weight % 2:
            raise ConfigError(f"weight must be even and >= 2, got {self.weight}")
        if isinstance(self.generator, EllipticCurve) and self.weight != 2:
            raise ConfigError("elliptic-curve forms have weight 2")
        if isinstance(self.generator, EtaProduct):
            if self.generator.weight != self.weight:
                raise ConfigError(
                    f"eta product has weight {self.generator.weight}, declared {self.weight}"
                )
            self.generator.check_level(self.level)


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """Coefficients ``a(n)`` for ``1 <= n <= bound``.

    ``a[0]`` is a placeholder zero so that ``a[n]`` is the n-th coefficient.
    Integral tables hold Python ints (exact, unbounded); real tables hold a
    read-only float64 array together with ``scale``, a per-index magnitude
    envelope used to decide when a computed value is indistinguishable from 0.
    """

    spec: FormSpec
    a: Sequence
    eigenform: bool = True
    scale: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.a) < 2:
            raise ConfigError("table must cover at least n = 1")

    @property
    def bound(self) -> int:
        return len(self.a) - 1

    @property
    def level(self) -> int:
        return self.spec.level

    @property
    def weight(self) -> int:
        return self.spec.weight

    @property
    def label(self) -> str:
        return self.spec.label

    @cached_property
    def integral(self) -> bool:
        return isinstance(self.a, tuple) and all(isinstance(x, Integral) for x in self.a[1:50])

    def __getitem__(self, n: int):
        if not 1 <= n <= self.bound:
            raise BoundError(f"n={n} outside table {self.label} (bound {self.bound})")
        return self.a[n]

    def require(self, n: int) -> None:
        if n > self.bound:
            raise BoundError(f"{self.label} covers n <= {self.bound}, need {n}")

    @cached_property
    def lam(self) -> np.ndarray:
        """Normalized coefficients ``lambda(n) = a(n) / n^((k-1)/2)``, float64."""
        n = np.arange(self.bound + 1, dtype=np.float64)
        n[0] = 1.0
        vals = np.array(self.a, dtype=np.float64)
        out = vals / n ** ((self.weight - 1) / 2)
        out[0] = 0.0
        out.setflags(write=False)
        return out

    @cached_property
    def signs(self) -> np.ndarray:
        """Exact signs (int8) of ``a(n)``; index 0 is 0."""
        if self.integral:
            s = np.fromiter(((x > 0) - (x < 0) for x in self.a), dtype=np.int8, count=len(self.a))
        else:
            vals = np.asarray(self.a, dtype=np.float64)
            band = 1e-9 * (self.scale if self.scale is not None else np.abs(vals))
            s = np.where(vals > band, 1, np.where(vals < -band, -1, 0)).astype(np.int8)
        s.setflags(write=False)
        return s

    def ap(self, p: int):
        return self[p]


def table_from_list(spec: FormSpec, coeffs: Sequence[int], eigenform: bool = True) -> CoeffTable:
    """Wrap ``[a(1), ..., a(B)]`` as a table."""
    return CoeffTable(spec, (0, *(int(c) for c in coeffs)), eigenform=eigenform)


def eta_table(spec: FormSpec, B: int, product: EtaProduct | None = None) -> CoeffTable:
    product = spec.generator if product is None else product
    if not isinstance(product, EtaProduct):
        raise ConfigError(f"{spec.label} is not an eta product")
    return table_from_list(spec, eta_expand(product, B))


# -- Hecke recursion ----------------------------------------------------------


def prime_power_coefficient(ap: int, p: int, k: int, r: int, bad: bool = False) -> int:
    """Exact ``a(p^r)`` from ``a(p)``.

    Good ``p``: ``a(p^(r+1)) = a(p) a(p^r) - p^(k-1) a(p^(r-1))``, evaluated as
    a 2x2 matrix power so large ``r`` costs ``O(log r)`` big multiplications.
    Bad ``p``: ``a(p^r) = a(p)^r``.
    """
    if r < 0:
        raise ConfigError("negative exponent")
    if bad:
        return ap**r
    c = p ** (k - 1)
    # M = [[ap, -c], [1, 0]]; a(p^r) = (M^r)[0][0]
    r00, r01, r10, r11 = 1, 0, 0, 1
    b00, b01, b10, b11 = ap, -c, 1, 0
    e = r
    while e:
        if e & 1:
            r00, r01, r10, r11 = (
                r00 * b00 + r01 * b10,
                r00 * b01 + r01 * b11,
                r10 * b00 + r11 * b10,
                r10 * b01 + r11 * b11,
            )
        b00, b01, b10, b11 = (
            b00 * b00 + b01 * b10,
            b00 * b01 + b01 * b11,
            b10 * b00 + b11 * b10,
            b10 * b01 + b11 * b11,
        )
        e >>= 1
    return r00


def hecke_extend(
    M: int,
    k: int,
    bad_ap: Mapping[int, int],
    good_ap: Mapping[int, int],
    B: int,
    spec: FormSpec | None = None,
) -> CoeffTable:
    """Fill ``a(n)``, ``n <= B``, from prime coefficients by multiplicativity."""
    if B < 1:
        raise ConfigError("bound must be positive")
    if spec is None:
        spec = FormSpec(M, k, f"hecke[{M},{k}]")
    a = [0] * (B + 1)
    a[1] = 1
    for p in map(int, primes_upto(B)):
        bad = M % p == 0
        src = bad_ap if bad else good_ap
        try:
            ap = int(src[p])
        except KeyError:
            kind = "bad" if bad else "good"
            raise MissingCoefficientError(f"no a_p for {kind} prime {p}") from None
        c = p ** (k - 1)
        prev, cur, q = 1, ap, p
        while q <= B:
            a[q] = cur
            prev, cur = cur, (ap * cur if bad else ap * cur - c * prev)
            q *= p
    spf = smallest_prime_factor(B).tolist()
    for n in range(6, B + 1):
        p = spf[n]
        if p == n:
            continue
        q, m = p, n // p
        while m % p == 0:
            m //= p
            q *= p
        if m > 1:
            a[n] = a[q] * a[m]
    return CoeffTable(spec, tuple(a), eigenform=True)


# -- characters and derived tables ------------------------------------------


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol ``(D/n)`` for ``n >= 1``."""
    if n < 1:
        raise ConfigError("kronecker symbol needs n >= 1")
    if gcd(D, n) > 1:
        return 0
    result = 1
    while n % 2 == 0:
        n //= 2
        # D is odd here since gcd(D, 2) = 1
        if D % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * _jacobi(D, n)


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D == 0:
        return False

    def squarefree(m: int) -> bool:
        m = abs(m)
        f = 2
        while f * f <= m:
            if m % (f * f) == 0:
                return False
            f += 1
        return True

    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def character_values(D: int, B: int) -> np.ndarray:
    chi = np.zeros(B + 1, dtype=np.int8)
    for n in range(1, B + 1):
        chi[n] = kronecker(D, n)
    return chi


def twist(t: CoeffTable, D: int) -> CoeffTable:
    """``a(n) (D/n)``; the spec's level is the standard bound ``lcm(M, D^2)``."""
    if not is_fundamental_discriminant(D):
        raise ConfigError(f"{D} is not a fundamental discriminant")
    if D == 1:
        return t
    chi = character_values(D, t.bound)
    spec = FormSpec(lcm(t.level, D * D), t.weight, f"{t.label}x({D}/.)")
    if t.integral:
        a = tuple(int(c) * x for c, x in zip(chi.tolist(), t.a))
        return CoeffTable(spec, a, eigenform=t.eigenform)
    vals = np.asarray(t.a, dtype=np.float64) * chi
    vals.setflags(write=False)
    return CoeffTable(spec, vals, eigenform=t.eigenform, scale=t.scale)


def oldform_shift(t: CoeffTable, p: int) -> CoeffTable:
    """``g(z) = f(z) + f(pz)``: ``a_g(n) = a_f(n) + a_f(n/p)``."""
    spec = FormSpec(t.level * p, t.weight, f"{t.label}+B{p}")
    B = t.bound
    if t.integral:
        a = list(t.a)
        for n in range(p, B + 1, p):
            a[n] += t.a[n // p]
        return CoeffTable(spec, tuple(a), eigenform=False)
    vals = np.array(t.a, dtype=np.float64)
    idx = np.arange(p, B + 1, p)
    vals[idx] += np.asarray(t.a, dtype=np.float64)[idx // p]
    scale = None
    if t.scale is not None:
        scale = t.scale.copy()
        scale[idx] += t.scale[idx // p]
        scale.setflags(write=False)
    vals.setflags(write=False)
    return CoeffTable(spec, vals, eigenform=False, scale=scale)


@dataclass(frozen=True)
class LinearCombination:
    basis: tuple[CoeffTable, ...]
    coeffs: tuple[Real, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.basis:
            raise ConfigError("empty basis")
        if len(self.basis) != len(self.coeffs):
            raise ConfigError("basis and coefficient lengths differ")
        if all(u == 0 for u in self.coeffs):
            raise ConfigError("coefficient vector is zero")


def linear_combo(c: LinearCombination, label: str | None = None, strict_level: bool = True) -> CoeffTable:
    """``a(n) = sum u_i a_i(n)``.

    With ``strict_level=False`` only weight and bound must agree; this is
    what lets a twist enter a combination next to the untwisted form.
    """
    first = c.basis[0]
    for t in c.basis[1:]:
        if t.weight != first.weight or t.bound != first.bound or (
            strict_level and t.level != first.level
        ):
            raise ConfigError(
                f"basis mismatch: {first.label} (M={first.level}, k={first.weight}, B={first.bound})"
                f" vs {t.label} (M={t.level}, k={t.weight}, B={t.bound})"
            )
    level = first.level if strict_level else lcm(*(t.level for t in c.basis))
    if label is None:
        label = " + ".join(f"{u}*{t.label}" for u, t in zip(c.coeffs, c.basis))
    spec = FormSpec(level, first.weight, label)

    exact = all(isinstance(u, Integral) for u in c.coeffs) and all(t.integral for t in c.basis)
    if exact:
        cols = [t.a for t in c.basis]
        a = tuple(sum(int(u) * col[n] for u, col in zip(c.coeffs, cols)) for n in range(first.bound + 1))
        return CoeffTable(spec, a, eigenform=False)

    vals = np.zeros(first.bound + 1, dtype=np.float64)
    scale = np.zeros(first.bound + 1, dtype=np.float64)
    for u, t in zip(c.coeffs, c.basis):
        col = np.asarray(t.a, dtype=np.float64)
        vals += float(u) * col
        scale += abs(float(u)) * (np.abs(col) if t.scale is None else t.scale)
    vals.setflags(write=False)
    scale.setflags(write=False)
    return CoeffTable(spec, vals, eigenform=False, scale=scale)


def deligne_violations(t: CoeffTable, upto: int | None = None) -> list[int]:
    """Good primes ``p`` with ``a(p)^2 > 4 p^(k-1)`` (exact for integral tables)."""
    upto = t.bound if upto is None else min(upto, t.bound)
    bad = []
    for p in map(int, primes_upto(upto)):
        if t.level % p == 0:
            continue
        ap = t.a[p]
        if t.integral:
            if ap * ap > 4 * p ** (t.weight - 1):
                bad.append(p)
        elif abs(ap) > 2 * p ** ((t.weight - 1) / 2) * (1 + 1e-12):
            bad.append(p)
    return bad


def multiplicativity_failures(t: CoeffTable, limit: int | None = None) -> list[tuple[int, int]]:
    """Coprime pairs ``(m, n)``, ``mn <= bound``, with ``a(mn) != a(m) a(n)``."""
    B = t.bound
    out = []
    for m in range(2, isqrt(B) + 1):
        for n in range(m + 1, B // m + 1):
            if gcd(m, n) == 1 and t.a[m * n] != t.a[m] * t.a[n]:
                out.append((m, n))
                if limit and len(out) >= limit:
                    return out
    return out

