"""Sign patterns of ``a_f(n) a_g(n)`` and the experiments built on them."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np

from .coeffs import (
    CoeffTable,
    EllipticCurve,
    LinearCombination,
    ec_ap,
    kronecker,
    linear_combo,
    oldform_shift,
    twist,
)
from .errors import ConfigError, DataError
from .primes import primes_upto

MAX_WITNESSES = 32


def _check_range(f: CoeffTable, g: CoeffTable, n_lo: int, n_hi: int) -> None:
    if n_lo < 1 or n_hi < n_lo:
        raise ConfigError(f"bad range [{n_lo}, {n_hi}]")
    f.require(n_hi)
    g.require(n_hi)


def product_signs(f: CoeffTable, g: CoeffTable, n_hi: int | None = None) -> np.ndarray:
    """``sign(a_f(n) a_g(n))`` for ``0 <= n <= n_hi`` (index 0 is 0)."""
    n_hi = min(f.bound, g.bound) if n_hi is None else n_hi
    _check_range(f, g, 1, n_hi)
    return f.signs[: n_hi + 1].astype(np.int8) * g.signs[: n_hi + 1].astype(np.int8)


@dataclass
class SignScanReport:
    f: str
    g: str
    n_lo: int
    n_hi: int
    q: int
    positive: int
    negative: int
    zero: int
    first_negative: int | None
    witnesses: list[tuple[int, object, object]] = field(default_factory=list)

    @property
    def scanned(self) -> int:
        return self.positive + self.negative + self.zero

    def to_dict(self) -> dict:
        return {
            "f": self.f,
            "g": self.g,
            "range": [self.n_lo, self.n_hi],
            "q": self.q,
            "counts": {"positive": self.positive, "negative": self.negative, "zero": self.zero},
            "first_negative": self.first_negative,
            "witnesses": [[n, _jsonable(x), _jsonable(y)] for n, x, y in self.witnesses],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def witnesses_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_f", "a_g", "sign"])
        for n, x, y in self.witnesses:
            w.writerow([n, _jsonable(x), _jsonable(y), -1])
        return buf.getvalue()


def _jsonable(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    return repr(float(x)) if not math.isfinite(float(x)) else float(x)


def sign_scan(f: CoeffTable, g: CoeffTable, n_lo: int, n_hi: int, q: int = 1, max_witnesses: int = MAX_WITNESSES) -> SignScanReport:
    """Classify ``a_f(n) a_g(n)`` for ``n_lo <= n <= n_hi`` with ``gcd(n, q) = 1``."""
    if q < 1:
        raise ConfigError("q must be >= 1")
    _check_range(f, g, n_lo, n_hi)
    s = product_signs(f, g, n_hi)[n_lo:]
    n = np.arange(n_lo, n_hi + 1)
    if q > 1:
        keep = np.gcd(n, q) == 1
        s, n = s[keep], n[keep]
    neg = n[s < 0]
    wit = [(int(m), f[int(m)], g[int(m)]) for m in neg[:max_witnesses]]
    return SignScanReport(
        f.label,
        g.label,
        n_lo,
        n_hi,
        q,
        int((s > 0).sum()),
        int((s < 0).sum()),
        int((s == 0).sum()),
        int(neg[0]) if len(neg) else None,
        wit,
    )


def first_negative(f: CoeffTable, g: CoeffTable, B: int) -> int | None:
    """Smallest ``n <= B`` with ``a_f(n) a_g(n) < 0``, or ``None``."""
    s = product_signs(f, g, B)
    idx = np.flatnonzero(s < 0)
    return int(idx[0]) if len(idx) else None


# -- remarks ---------------------------------------------------------------


@dataclass
class IdentityReport:
    name: str
    f: str
    g: str
    bound: int
    parameter: int
    identity_failures: list[int]
    negatives: int
    zeros: int
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.identity_failures and self.negatives == 0

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "f": self.f,
            "g": self.g,
            "bound": self.bound,
            "parameter": self.parameter,
            "identity_failures": self.identity_failures[:MAX_WITNESSES],
            "n_identity_failures": len(self.identity_failures),
            "negatives": self.negatives,
            "zeros": self.zeros,
            "ok": self.ok,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _truncated(t: CoeffTable, B: int) -> CoeffTable:
    t.require(B)
    if B == t.bound:
        return t
    return CoeffTable(t.spec, t.a[: B + 1], eigenform=t.eigenform, scale=None if t.scale is None else t.scale[: B + 1])


def remark1_check(f: CoeffTable, D: int, B: int) -> IdentityReport:
    """``g = 2f + f x (D/.)`` satisfies ``a_f a_g = a_f^2 (2 + (D/n))``, so never negative."""
    if not f.integral:
        raise ConfigError("remark1_check needs an integral table")
    f = _truncated(f, B)
    tw = twist(f, D)
    g = linear_combo(LinearCombination((f, tw), (2, 1)), label=f"2*{f.label}+{tw.label}", strict_level=False)
    bad = []
    for n in range(1, B + 1):
        a = f.a[n]
        if a * g.a[n] != a * a * (2 + kronecker(D, n)):
            bad.append(n)
    rep = sign_scan(f, g, 1, B)
    return IdentityReport("remark1", f.label, g.label, B, D, bad, rep.negative, rep.zero)


def supersingular_primes(E: EllipticCurve, bound: int) -> list[int]:
    """Good primes ``3 < p <= bound`` with ``a_p = 0``."""
    if bound < 5:
        raise ConfigError("bound must be >= 5")
    out = []
    for p in primes_upto(bound).tolist():
        if p <= 3 or not E.has_good_reduction(p):
            continue
        if ec_ap(E, p) == 0:
            out.append(p)
    return out


def remark2_check(f: CoeffTable, p: int, B: int) -> IdentityReport:
    """``g(z) = f(z) + f(pz)`` at a prime with ``a_f(p) = 0``.

    Checks ``a_f a_g = a_f^2 + a_f(n) a_f(n/p)`` and the stronger
    ``a_f a_g = a_f^2`` (the cross term vanishes because one of ``a_f(p^r)``,
    ``a_f(p^(r-1))`` is zero).  ``parameter`` in the report is ``p``.
    """
    if not f.integral:
        raise ConfigError("remark2_check needs an integral table")
    if f.level % p == 0:
        raise ConfigError(f"{p} divides the level")
    if f[p] != 0:
        raise ConfigError(f"a_f({p}) = {f[p]} != 0; p is not supersingular")
    f = _truncated(f, B)
    g = oldform_shift(f, p)
    bad_expansion, bad_square, coprime_bad = [], [], []
    for n in range(1, B + 1):
        a = f.a[n]
        cross = a * f.a[n // p] if n % p == 0 else 0
        prod = a * g.a[n]
        if prod != a * a + cross:
            bad_expansion.append(n)
        if prod != a * a:
            bad_square.append(n)
            if gcd(n, p) == 1:
                coprime_bad.append(n)
    rep = sign_scan(f, g, 1, B)
    return IdentityReport(
        "remark2",
        f.label,
        g.label,
        B,
        p,
        sorted(set(bad_expansion) | set(coprime_bad)),
        rep.negative,
        rep.zero,
        extra={"square_identity_failures": len(bad_square)},
    )


# -- first sign change under perturbation ---------------------------


@dataclass
class Remark4Result:
    phi: str
    psi: str
    bound: int
    eps: list[float]
    first_negative: list[int | None]

    def merged(self) -> list[float]:
        """The sequence with ``None`` read as beyond the bound and consecutive ties merged."""
        seq = [math.inf if v is None else v for v in self.first_negative]
        out: list[float] = []
        for v in seq:
            if not out or out[-1] != v:
                out.append(v)
        return out

    @property
    def trend_ok(self) -> bool:
        m = self.merged()
        return all(a <= b for a, b in zip(m, m[1:])) and m[-1] > m[0]

    def to_dict(self) -> dict:
        return {
            "phi": self.phi,
            "psi": self.psi,
            "bound": self.bound,
            "mixing": "pi",
            "rows": [
                {"eps": e, "first_negative": v if v is not None else f"none <= {self.bound}"}
                for e, v in zip(self.eps, self.first_negative)
            ],
            "trend_ok": self.trend_ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def default_eps(n: int = 11) -> list[float]:
    return [2.0**-i for i in range(n)]


def remark4_experiment(
    phi: CoeffTable, psi: CoeffTable, eps_list: Sequence[float], B: int, scale: float = 1.0
) -> Remark4Result:
    """``f = phi + pi psi``, ``g_eps = f + eps phi``; first sign change of ``a_f a_g`` per ``eps``.

    ``scale`` rescales the eigenbasis (both ``f`` and ``g``); the answer must not move.
    """
    if phi.level != psi.level or phi.weight != psi.weight:
        raise ConfigError("phi and psi must share level and weight")
    if phi is psi or (phi.integral and psi.integral and phi.a[: B + 1] == psi.a[: B + 1]):
        raise ConfigError("phi and psi must differ")
    eps_list = [float(e) for e in eps_list]
    if any(e < 0 for e in eps_list):
        raise ConfigError("eps must be non-negative")
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps_list must be strictly decreasing")
    phi, psi = _truncated(phi, B), _truncated(psi, B)
    f = linear_combo(LinearCombination((phi, psi), (scale, scale * math.pi)), label="f")
    out = []
    for e in eps_list:
        g = linear_combo(LinearCombination((phi, psi), (scale * (1 + e), scale * math.pi)), label=f"g_{e}")
        out.append(first_negative(f, g, B))
    return Remark4Result(phi.label, psi.label, B, eps_list, out)


# -- Rankin-Selberg partial sums -------------------------------------------------


@dataclass
class PartialSumSeries:
    f: str
    g: str
    checkpoints: list[int]
    cross: list[float]  # sum lambda_f lambda_g / p
    square: list[float]  # sum (lambda_f lambda_g)^2 / p
    negative: list[float]  # sum over lambda_f lambda_g < 0 of 1/p
    harmonic: list[float]  # sum 1/p
    d: int = 1
    d_prime: int = 1

    def ratio(self) -> list[float]:
        """``sum_{<0} 1/p / ((1 / 32 d d') sum 1/p)`` at each checkpoint."""
        c = 1.0 / (32 * self.d * self.d_prime)
        return [n / (c * h) for n, h in zip(self.negative, self.harmonic)]

    def to_dict(self) -> dict:
        return {
            "f": self.f,
            "g": self.g,
            "d": self.d,
            "d_prime": self.d_prime,
            "checkpoints": self.checkpoints,
            "cross": self.cross,
            "square": self.square,
            "negative": self.negative,
            "harmonic": self.harmonic,
            "ratio": self.ratio(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "cross", "square", "negative", "harmonic", "ratio"])
        for row in zip(self.checkpoints, self.cross, self.square, self.negative, self.harmonic, self.ratio()):
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


def rankin_selberg_sums(f: CoeffTable, g: CoeffTable, checkpoints: Sequence[int], d: int = 1, d_prime: int = 1) -> PartialSumSeries:
    """Partial sums over good primes ``p <= x`` for each checkpoint ``x``."""
    checkpoints = sorted(int(x) for x in checkpoints)
    if not checkpoints or checkpoints[0] < 2:
        raise ConfigError("checkpoints must be >= 2")
    if d < 1 or d_prime < 1:
        raise ConfigError("d, d' must be >= 1")
    X = checkpoints[-1]
    f.require(X)
    g.require(X)
    ps = np.array([p for p in primes_upto(X).tolist() if f.level % p and g.level % p], dtype=np.int64)
    if len(ps) == 0:
        raise DataError("no good primes")
    ll = f.lam[ps] * g.lam[ps]
    sgn = f.signs[ps].astype(np.int64) * g.signs[ps].astype(np.int64)
    inv = 1.0 / ps
    cum = [np.cumsum(v) for v in (ll * inv, ll * ll * inv, np.where(sgn < 0, inv, 0.0), inv)]
    idx = np.searchsorted(ps, checkpoints, side="right") - 1
    series = [[float(c[i]) if i >= 0 else 0.0 for i in idx] for c in cum]
    return PartialSumSeries(f.label, g.label, checkpoints, *series, d=d, d_prime=d_prime)
