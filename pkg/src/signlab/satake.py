"""Satake angles and the joint Sato-Tate law.

For a weight-k newform and a good prime p,
``a(p) = 2 p^((k-1)/2) cos(2 pi theta(p))`` with ``theta(p)`` in ``[0, 1/2]``.
Under Sato-Tate the marginal density of theta is ``4 sin^2(2 pi u)`` and for a
twist-inequivalent non-CM pair the joint density is the product.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np

from .coeffs import CoeffTable
from .errors import ConfigError, DataError, DeligneViolation
from .primes import primes_upto


def angle(a_p, p: int, k: int) -> float:
    """``theta = arccos(a_p / (2 p^((k-1)/2))) / (2 pi)``, clamped into ``[0, 1/2]``."""
    if isinstance(a_p, (int, np.integer)):
        a_p = int(a_p)
        if a_p * a_p > 4 * p ** (k - 1):
            raise DeligneViolation(f"|a_p|={abs(a_p)} exceeds 2 p^((k-1)/2) at p={p}, k={k}")
        if a_p * a_p == 4 * p ** (k - 1):
            return 0.0 if a_p > 0 else 0.5
        if a_p == 0:
            return 0.25
    x = float(a_p) / (2.0 * p ** ((k - 1) / 2))
    if abs(x) > 1.0 + 1e-12:
        raise DeligneViolation(f"normalized coefficient {x} outside [-1, 1] at p={p}")
    return math.acos(min(1.0, max(-1.0, x))) / (2 * math.pi)


def angle_mp(a_p: int, p: int, k: int, prec: int = 128) -> mpmath.mpf:
    """Extended-precision Satake angle with ``prec`` bits."""
    with mpmath.workprec(prec + 16):
        x = mpmath.mpf(int(a_p)) / (2 * mpmath.power(p, mpmath.mpf(k - 1) / 2))
        if abs(x) > 1:
            raise DeligneViolation(f"|a_p| exceeds the Deligne bound at p={p}")
        theta = mpmath.acos(x) / (2 * mpmath.pi)
    return theta


def joint_density(u: float, v: float) -> float:
    """``(4 sin(2 pi u) sin(2 pi v))^2``."""
    return (4.0 * math.sin(2 * math.pi * u) * math.sin(2 * math.pi * v)) ** 2


def marginal_density(u: float) -> float:
    return 4.0 * math.sin(2 * math.pi * u) ** 2


def marginal_cdf(u):
    """Sato-Tate CDF on ``[0, 1/2]``: ``2u - sin(4 pi u) / (2 pi)``."""
    u = np.asarray(u, dtype=np.float64)
    out = 2 * u - np.sin(4 * np.pi * u) / (2 * np.pi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Box:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        if not (0 <= self.alpha <= self.beta <= 0.5 and 0 <= self.gamma <= self.delta <= 0.5):
            raise ConfigError(f"box {self} not inside [0,1/2]^2 with ordered endpoints")


FULL_SQUARE = Box(0.0, 0.5, 0.0, 0.5)


def box_probability(B: Box) -> float:
    """Sato-Tate mass of ``B``: product of the two marginal integrals."""
    pu = marginal_cdf(B.beta) - marginal_cdf(B.alpha)
    pv = marginal_cdf(B.delta) - marginal_cdf(B.gamma)
    return float(pu * pv)


@dataclass(frozen=True, eq=False)
class AngleTable:
    """Angles ``theta(p)`` of one form at the good primes ``p <= x``."""

    label: str
    level: int
    weight: int
    primes: np.ndarray
    theta: np.ndarray
    ap: tuple

    @cached_property
    def by_prime(self) -> dict[int, float]:
        return dict(zip(self.primes.tolist(), self.theta.tolist()))

    def __getitem__(self, p: int) -> float:
        return self.by_prime[p]

    def reconstruct(self) -> np.ndarray:
        p = self.primes.astype(np.float64)
        return 2 * p ** ((self.weight - 1) / 2) * np.cos(2 * np.pi * self.theta)


def angle_table(t: CoeffTable, x: int | None = None) -> AngleTable:
    x = t.bound if x is None else x
    t.require(x)
    ps = [p for p in primes_upto(x).tolist() if t.level % p]
    aps = tuple(t.a[p] for p in ps)
    theta = np.array([angle(a, p, t.weight) for a, p in zip(aps, ps)], dtype=np.float64)
    theta.setflags(write=False)
    primes = np.array(ps, dtype=np.int64)
    primes.setflags(write=False)
    return AngleTable(t.label, t.level, t.weight, primes, theta, aps)


def ks_distance(sample: np.ndarray) -> float:
    """Sup distance between the empirical CDF of ``sample`` and the Sato-Tate CDF."""
    s = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(s)
    if n == 0:
        raise DataError("empty sample")
    F = marginal_cdf(s)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


@dataclass
class EquidistributionReport:
    grid_n: int
    n_primes: int
    counts: np.ndarray  # counts[i, j] for cell [i/2g, (i+1)/2g) x [j/2g, (j+1)/2g)
    theoretical: np.ndarray
    discrepancy: float
    marginal_sup_f: float
    marginal_sup_g: float

    @property
    def empirical(self) -> np.ndarray:
        return self.counts / self.n_primes

    def cells(self):
        h = 0.5 / self.grid_n
        emp = self.empirical
        for i in range(self.grid_n):
            for j in range(self.grid_n):
                yield (i * h, j * h, float(emp[i, j]), float(self.theoretical[i, j]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cell_u", "cell_v", "empirical", "theoretical"])
        for u, v, e, t in self.cells():
            w.writerow([repr(u), repr(v), repr(e), repr(t)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "discrepancy": self.discrepancy,
            "marginal_sup_f": self.marginal_sup_f,
            "marginal_sup_g": self.marginal_sup_g,
            "n_primes": self.n_primes,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2)


def equidistribution_report(phi: AngleTable, psi: AngleTable, x: int, grid_n: int) -> EquidistributionReport:
    """Compare joint angle frequencies of two forms with the Sato-Tate law on a grid.

    Primes dividing either level are excluded.  ``discrepancy`` is the sup of
    ``|empirical - theoretical|`` over all boxes that are unions of grid cells.
    """
    if grid_n < 1:
        raise ConfigError("grid_n must be >= 1")
    common = sorted((set(phi.by_prime) & set(psi.by_prime)))
    ps = [p for p in common if p <= x and phi.level % p and psi.level % p]
    if not ps:
        raise DataError("no primes in common below x")
    u = np.array([phi.by_prime[p] for p in ps])
    v = np.array([psi.by_prime[p] for p in ps])
    g = grid_n
    iu = np.minimum((u * 2 * g).astype(np.int64), g - 1)
    iv = np.minimum((v * 2 * g).astype(np.int64), g - 1)
    counts = np.zeros((g, g), dtype=np.int64)
    np.add.at(counts, (iu, iv), 1)

    edges = np.linspace(0.0, 0.5, g + 1)
    edges[-1] = 0.5
    cdf = marginal_cdf(edges)
    theo = np.outer(np.diff(cdf), np.diff(cdf))

    # 2-d prefix sums; every grid-aligned box is [i0, i1) x [j0, j1)
    n = len(ps)
    E = np.zeros((g + 1, g + 1))
    E[1:, 1:] = np.cumsum(np.cumsum(counts, 0), 1) / n
    T = np.outer(cdf - cdf[0], cdf - cdf[0])
    D = E - T
    disc = 0.0
    for i0 in range(g + 1):
        for i1 in range(i0 + 1, g + 1):
            rows = D[i1] - D[i0]
            box = rows[None, :] - rows[:, None]  # box[j0, j1] = rows[j1] - rows[j0]
            disc = max(disc, float(np.max(np.abs(box))))
    return EquidistributionReport(
        grid_n=g,
        n_primes=n,
        counts=counts,
        theoretical=theo,
        discrepancy=disc,
        marginal_sup_f=ks_distance(u),
        marginal_sup_g=ks_distance(v),
    )


@dataclass(frozen=True)
class SignDensity:
    n_primes: int
    positive: int
    negative: int
    zero: int

    @property
    def fractions(self) -> dict[str, float]:
        n = self.n_primes
        return {"positive": self.positive / n, "negative": self.negative / n, "zero": self.zero / n}


def sign_density_primes(f: CoeffTable, g: CoeffTable, x: int) -> SignDensity:
    """Sign classes of ``a_f(p) a_g(p)`` over primes ``p <= x``, ``p`` not dividing ``MN``."""
    f.require(x)
    g.require(x)
    ps = [p for p in primes_upto(x).tolist() if f.level % p and g.level % p]
    if not ps:
        raise DataError("no good primes below x")
    s = f.signs[ps].astype(np.int64) * g.signs[ps].astype(np.int64)
    return SignDensity(len(ps), int((s > 0).sum()), int((s < 0).sum()), int((s == 0).sum()))
