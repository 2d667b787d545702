"""Steering eigencoefficient vectors towards a prescribed projective direction.

For distinct primes ``p_1..p_d`` and eigenforms ``phi_1..phi_d`` the vector
``(lambda_j(p_1^k_1 ... p_d^k_d))_j`` has entries
``prod_i sin(2 pi (k_i + 1) theta_ij) / sin(2 pi theta_ij)``.  Choosing phases
``phi_ij`` with ``prod_i sin(2 pi phi_ij)`` proportional to ``w_j`` and then
exponents with ``(k_i + 1) theta_ij ~ phi_ij (mod 1)`` for all ``j`` at once
makes the coefficient vector point (projectively) along ``w``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .coeffs import CoeffTable, prime_power_coefficient
from .errors import ConfigError, DegenerateAngleError
from .lattice import lll_reduce
from .satake import angle, angle_mp

EXHAUSTIVE_LIMIT = 10**5
SMALL_GRID_CELLS = 2**16
DOUBLE_PHASE_LIMIT = 10**6
PERTURBATION = 1e-3


# -- scalar pieces -------------------------------------------------------------


def lambda_prime_power(theta, r: int) -> float:
    """``lambda(p^r) = sin(2 pi (r+1) theta) / sin(2 pi theta)``."""
    if r < 0:
        raise ConfigError("r must be >= 0")
    if r == 0:
        return 1.0
    if r <= 1000:
        th = float(theta)
        if th <= 0.0 or th >= 0.5:
            raise DegenerateAngleError(f"theta={th} has sin(2 pi theta) = 0")
        phase = math.fmod((r + 1) * th, 1.0)
        return math.sin(2 * math.pi * phase) / math.sin(2 * math.pi * th)
    with mpmath.workprec(128 + int(r).bit_length()):
        th = mpmath.mpf(theta)
        if th <= 0 or th >= 0.5:
            raise DegenerateAngleError(f"theta={th} has sin(2 pi theta) = 0")
        phase = mpmath.frac((r + 1) * th)
        return float(mpmath.sin(2 * mpmath.pi * phase) / mpmath.sin(2 * mpmath.pi * th))


def circle_distance(x):
    """Distance to the nearest integer, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    return np.abs(x - np.rint(x))


def projective_distance(a: Sequence[float], w: Sequence[float]) -> float:
    """Angle in ``[0, pi/2]`` between the lines spanned by ``a`` and ``w``."""
    a = np.asarray(a, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    na, nw = np.linalg.norm(a), np.linalg.norm(w)
    if na == 0 or nw == 0:
        return math.pi / 2
    c = min(1.0, abs(float(a @ w)) / (na * nw))
    return math.acos(c)


@dataclass(frozen=True)
class DirectionTarget:
    w: tuple[float, ...]

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or len(w) < 2:
            raise ConfigError("direction must have d >= 2 components")
        n = np.linalg.norm(w)
        if n == 0:
            raise ConfigError("direction must be non-zero")
        object.__setattr__(self, "w", tuple((w / n).tolist()))

    @property
    def d(self) -> int:
        return len(self.w)

    def perturbed(self, eps: float = PERTURBATION) -> "DirectionTarget":
        """Replace exactly-zero components by ``eps`` so every phase is defined."""
        w = [c if c != 0 else eps for c in self.w]
        return DirectionTarget(tuple(w))


def phase_targets(w: DirectionTarget, Theta, reflect: Sequence[bool] | None = None, flip: bool = False) -> np.ndarray:
    """Phases ``phi_ij`` in ``[0, 1)`` with ``prod_i sin(2 pi phi_ij)`` proportional to ``w_j``.

    Rows ``i >= 1`` (0-based) get phase 1/4.  Row 0 carries everything:
    ``sin(2 pi phi_0j) = s w_j prod_i sin(2 pi theta_ij)`` with the largest
    ``s > 0`` keeping every argument in ``[-1, 1]``.  ``reflect[j]`` swaps
    ``phi`` for ``1/2 - phi`` (same sine) and ``flip`` negates the target,
    which is the same projective point.
    """
    Theta = np.asarray(Theta, dtype=np.float64)
    d = w.d
    if Theta.shape != (d, d):
        raise ConfigError(f"Theta must be {d}x{d}")
    if np.any(Theta <= 0) or np.any(Theta >= 0.5):
        raise DegenerateAngleError("all angles must lie strictly inside (0, 1/2)")
    wv = np.asarray(w.w)
    if np.any(wv == 0):
        raise ConfigError("zero target component; use DirectionTarget.perturbed()")
    if flip:
        wv = -wv
    weights = wv * np.prod(np.sin(2 * np.pi * Theta), axis=0)
    args = weights / np.max(np.abs(weights))
    phi = np.full((d, d), 0.25)
    row = np.arcsin(np.clip(args, -1.0, 1.0)) / (2 * np.pi)
    if reflect is not None:
        row = np.where(np.asarray(reflect, dtype=bool), 0.5 - row, row)
    phi[0] = np.mod(row, 1.0)
    return phi


# -- simultaneous approximation --------------------------------------------


@dataclass(frozen=True)
class Approximation:
    k: int
    distance: float
    method: str


def _exhaustive(theta: np.ndarray, phi: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.arange(1, K + 2, dtype=np.float64)[:, None]  # x = k + 1
    dist = circle_distance(x * theta[None, :] - phi[None, :]).max(axis=1)
    return dist, x[:, 0]


def _mp_distance(theta_mp, phi_mp, x: int) -> float:
    return max(float(abs(v - mpmath.nint(v))) for v in (x * t - f for t, f in zip(theta_mp, phi_mp)))


def _window(theta_mp, phi_mp, x0: int, half: int, K: int) -> tuple[int, float]:
    """Best ``x = k + 1`` in ``[x0 - half, x0 + half]``; phases anchored in extended precision."""
    lo = max(1, x0 - half)
    hi = min(K + 1, x0 + half)
    if lo > hi:
        return -1, math.inf
    base = np.array([float(mpmath.frac(lo * t - f)) for t, f in zip(theta_mp, phi_mp)])
    step = np.array([float(t) for t in theta_mp])
    i = np.arange(hi - lo + 1, dtype=np.float64)[:, None]
    dist = circle_distance(base[None, :] + i * step[None, :]).max(axis=1)
    j = int(np.argmin(dist))
    return lo + j, float(dist[j])


def simultaneous_approx(theta, phi, K: int, method: str = "auto", window: int = 2000) -> Approximation:
    """``k <= K`` minimizing ``max_j ||(k+1) theta_j - phi_j||``.

    Exhaustive (exact optimum, smallest ``k`` on ties) for ``K <= 10^5``;
    above that an LLL-reduced embedding lattice proposes candidates that are
    refined by exhaustive search in a window around each.
    """
    if K < 0:
        raise ConfigError("K must be >= 0")
    theta = list(theta)
    phi = list(phi)
    if len(theta) != len(phi) or not theta:
        raise ConfigError("theta and phi must be non-empty and of equal length")
    if method == "auto":
        method = "exhaustive" if K <= EXHAUSTIVE_LIMIT else "lattice"
    if method == "exhaustive":
        dist, _ = _exhaustive(np.array([float(t) for t in theta]), np.array([float(f) for f in phi]), K)
        k = int(np.argmin(dist))
        return Approximation(k, float(dist[k]), "exhaustive")
    if method != "lattice":
        raise ConfigError(f"unknown method {method!r}")
    return _lattice_approx(theta, phi, K, window)


def _lattice_approx(theta, phi, K: int, window: int) -> Approximation:
    d = len(theta)
    prec = 160 + int(K).bit_length()
    with mpmath.workprec(prec):
        th = [mpmath.mpf(t) for t in theta]
        ph = [mpmath.mpf(f) for f in phi]
        delta = mpmath.mpf(K) ** (-mpmath.mpf(1) / d)
        S = mpmath.mpf(2) ** 64
        # rows: x-row, d integer-shift rows, embedding row
        rows = []
        rows.append([S / K] + [S * t / delta for t in th] + [0])
        for j in range(d):
            r = [0] * (d + 2)
            r[1 + j] = -S / delta
            rows.append(r)
        rows.append([0] + [-S * f / delta for f in ph] + [S])
        basis = [[int(mpmath.nint(c)) for c in r] for r in rows]
        # the x-row's first entry and the embedding entry are the only ones
        # that do not vanish on the target combination
        red = lll_reduce(basis)
        E = int(mpmath.nint(S))
        xs = set()
        for coeffs in itertools.product((-1, 0, 1), repeat=len(red)):
            if not any(coeffs):
                continue
            v = [sum(c * row[col] for c, row in zip(coeffs, red)) for col in range(d + 2)]
            if abs(v[-1]) != E:
                continue
            sgn = 1 if v[-1] > 0 else -1
            x = int(mpmath.nint(sgn * v[0] * K / S))
            if 1 <= x <= K + 1:
                xs.add(x)
        best_x, best = 1, _mp_distance(th, ph, 1)
        for x0 in sorted(xs):
            x, dist = _window(th, ph, x0, window, K)
            if dist < best or (dist == best and x < best_x):
                best_x, best = x, dist
        # exact re-evaluation at the winner
        best = _mp_distance(th, ph, best_x)
    return Approximation(best_x - 1, best, "lattice")


# -- separating direction ------------------------------------------------


def separating_direction(u, v) -> np.ndarray:
    """``w' = w + delta u`` with ``w . u = 0``, so that ``w'.u`` and ``w'.v`` have opposite strict signs."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = float(np.linalg.norm(u))
    if nu == 0 or np.linalg.norm(v) == 0:
        raise ConfigError("u and v must be non-zero")
    w = v - (v @ u) / (u @ u) * u
    wv = float(w @ v)
    if abs(wv) <= 1e-12 * float(np.linalg.norm(v)) ** 2:
        raise ConfigError("u and v are proportional")
    uv = float(u @ v)
    delta = -math.copysign(1.0, wv) * min(1.0, abs(wv) / (2 * (abs(uv) + 1))) / nu
    while abs(delta) * abs(uv) >= abs(wv):
        delta /= 2
    return w + delta * u


# -- the search ------------------------------------------------------------


@dataclass
class SearchResult:
    primes: tuple[int, ...]
    exponents: tuple[int, ...]
    achieved: tuple[float, ...]
    target: tuple[float, ...]
    angular_distance: float
    verified: bool
    success: bool
    attempts: int = 0
    labels: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n_factored(self) -> list[list[int]]:
        return [[p, k] for p, k in zip(self.primes, self.exponents)]

    def n(self) -> int:
        out = 1
        for p, k in zip(self.primes, self.exponents):
            out *= p**k
        return out

    def to_dict(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "n_factored": self.n_factored,
            "achieved": list(self.achieved),
            "target": list(self.target),
            "angular_distance": self.angular_distance,
            "verified": self.verified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def exact_lambda(t: CoeffTable, p: int, r: int, prec: int = 128) -> mpmath.mpf:
    """``a(p^r) / p^(r(k-1)/2)`` from the exact integer Hecke recursion."""
    a = prime_power_coefficient(int(t[p]), p, t.weight, r)
    with mpmath.workprec(prec + 32):
        return mpmath.mpf(a) / mpmath.power(p, mpmath.mpf(r * (t.weight - 1)) / 2)


def _check_primes(basis: Sequence[CoeffTable], primes: Sequence[int]) -> None:
    if len(set(primes)) != len(primes):
        raise ConfigError("primes must be distinct")
    for p in primes:
        for t in basis:
            if t.level % p == 0:
                raise ConfigError(f"{p} divides the level of {t.label}")
            if t[p] == 0 or t[p] ** 2 == 4 * p ** (t.weight - 1):
                raise DegenerateAngleError(f"angle of {t.label} at {p} is rational (a_p = {t[p]})")


def _achieved(Theta: np.ndarray, ks: Sequence[int]) -> np.ndarray:
    d = Theta.shape[0]
    out = np.ones(d)
    for i, k in enumerate(ks):
        for j in range(d):
            out[j] *= lambda_prime_power(Theta[i, j], k)
    return out


def _row0_refine(Theta: np.ndarray, ks: list[int], wv: np.ndarray, K: int) -> tuple[int, float]:
    """Exhaustive choice of ``k_0`` minimizing the projective distance, other exponents fixed."""
    d = Theta.shape[0]
    rest = np.ones(d)
    for i in range(1, d):
        for j in range(d):
            rest[j] *= lambda_prime_power(Theta[i, j], ks[i])
    x = np.arange(1, K + 2, dtype=np.float64)[:, None]
    th = Theta[0][None, :]
    vecs = np.sin(2 * np.pi * np.mod(x * th, 1.0)) / np.sin(2 * np.pi * th) * rest[None, :]
    norms = np.linalg.norm(vecs, axis=1)
    cos = np.abs(vecs @ wv) / np.where(norms == 0, np.inf, norms)
    k0 = int(np.argmax(cos))
    return k0, math.acos(min(1.0, float(cos[k0])))


def _small_grid(Theta: np.ndarray, w: np.ndarray, K: int) -> tuple[float, list[int]]:
    """Best exponent vector with every ``k_i <= G`` (``(G+1)^d`` capped), by brute force."""
    d = Theta.shape[0]
    G = min(K, int(SMALL_GRID_CELLS ** (1 / d)) - 1)
    r = np.arange(G + 1, dtype=np.float64)[:, None]
    vecs = np.ones((1, d))
    for i in range(d):
        L = np.sin(2 * np.pi * np.mod((r + 1) * Theta[i][None, :], 1.0)) / np.sin(2 * np.pi * Theta[i][None, :])
        vecs = (vecs[:, None, :] * L[None, :, :]).reshape(-1, d)
    norms = np.linalg.norm(vecs, axis=1)
    cos = np.abs(vecs @ w) / np.where(norms == 0, np.inf, norms)
    j = int(np.argmax(cos))
    ks = [int(x) for x in np.unravel_index(j, (G + 1,) * d)]
    return math.acos(min(1.0, float(cos[j]))), ks


def direction_search(
    basis: Sequence[CoeffTable],
    primes: Sequence[int],
    w: DirectionTarget,
    eps: float,
    K: int,
    max_attempts: int | None = None,
    small_grid: bool = True,
) -> SearchResult:
    """Find ``n = prod p_i^k_i``, ``k_i <= K``, with ``[a_1(n) : ... : a_d(n)]`` within ``eps`` of ``w``."""
    d = len(basis)
    if len(primes) != d or w.d != d:
        raise ConfigError("need as many primes and target components as basis forms")
    if eps <= 0:
        raise ConfigError("eps must be positive")
    if len({(t.level, t.weight) for t in basis}) != 1:
        raise ConfigError("basis forms must share level and weight")
    primes = [int(p) for p in primes]
    _check_primes(basis, primes)
    Theta = np.array([[angle(t[p], p, t.weight) for t in basis] for p in primes])
    Theta_mp = [[angle_mp(t[p], p, t.weight) for t in basis] for p in primes]
    target = w.perturbed()
    wv = np.asarray(target.w)
    orig = np.asarray(w.w)

    K_ladder = sorted({min(K, 10**3), min(K, 10**4), K})
    patterns = [(flip, refl) for flip in (False, True) for refl in itertools.product((False, True), repeat=d)]
    # small exponents first: catches planted and near-exact targets outright
    best = _small_grid(Theta, orig, K) if small_grid else (math.inf, [0] * d)
    attempts = int(small_grid)
    for K_try in K_ladder if best[0] > 1e-9 else ():
        for flip, refl in patterns:
            if max_attempts is not None and attempts >= max_attempts:
                break
            attempts += 1
            phi = phase_targets(target, Theta, refl, flip)
            ks = [0] * d
            for i in range(1, d):
                ks[i] = simultaneous_approx(Theta_mp[i] if K_try > EXHAUSTIVE_LIMIT else Theta[i], phi[i], K_try).k
            # compensate row 0 for what rows >= 1 actually achieved
            rest = np.ones(d)
            for i in range(1, d):
                for j in range(d):
                    rest[j] *= lambda_prime_power(Theta[i, j], ks[i])
            with np.errstate(divide="ignore"):
                wt = (-wv if flip else wv) * np.sin(2 * np.pi * Theta[0]) / rest
            wt = np.where(np.isfinite(wt), wt, np.sign(wt) * 1e300)
            args = wt / np.max(np.abs(wt))
            row = np.arcsin(np.clip(args, -1, 1)) / (2 * np.pi)
            row = np.mod(np.where(np.asarray(refl), 0.5 - row, row), 1.0)
            if K_try <= EXHAUSTIVE_LIMIT:
                ks[0], dist = _row0_refine(Theta, ks, wv, K_try)
            else:
                ks[0] = simultaneous_approx(Theta_mp[0], row, K_try).k
                dist = projective_distance(_achieved(Theta, ks), wv)
            if dist < best[0]:
                best = (dist, list(ks))
            if best[0] <= eps / 2:
                break
        if best[0] <= eps / 2:
            break

    ks = best[1]
    achieved = _achieved(Theta, ks)
    # exact re-verification through the integer Hecke recursion
    exact = []
    for j, t in enumerate(basis):
        val = mpmath.mpf(1)
        for p, k in zip(primes, ks):
            val *= exact_lambda(t, p, k)
        exact.append(val)
    exact_f = np.array([float(v) for v in exact])
    scale = max(1.0, float(np.max(np.abs(exact_f))))
    verified = bool(np.all(np.abs(exact_f - achieved) <= 1e-9 * scale))
    dist = projective_distance(exact_f, orig)
    return SearchResult(
        primes=tuple(primes),
        exponents=tuple(ks),
        achieved=tuple(exact_f.tolist()),
        target=tuple(orig.tolist()),
        angular_distance=dist,
        verified=verified,
        success=verified and dist <= eps,
        attempts=attempts,
        labels=tuple(t.label for t in basis),
    )


def search_primes(basis: Sequence[CoeffTable], count: int | None = None, start: int = 2, limit: int = 10**4) -> list[int]:
    """The first ``count`` primes ``>= start`` usable for :func:`direction_search`.

    A prime qualifies when it is good for every form, every angle is
    irrational-looking (non-zero, admissible valuation, off the Deligne
    endpoints) and no pair of angles shows a relation in :func:`relation_scan`.
    """
    from .primes import primes_upto
    from .relations import angle_pairs, is_admissible, relation_scan

    count = len(basis) if count is None else count
    out: list[int] = []
    k = basis[0].weight
    for p in primes_upto(min(limit, min(t.bound for t in basis))).tolist():
        if p < start or any(t.level % p == 0 for t in basis):
            continue
        vals = [int(t[p]) for t in basis]
        if not is_admissible(vals, p, k) or any(a * a == 4 * p ** (k - 1) for a in vals):
            continue
        clean = True
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                if relation_scan(angle_pairs(basis[a], basis[b], [p])):
                    clean = False
        if clean:
            out.append(p)
            if len(out) == count:
                return out
    raise ConfigError(f"only {len(out)} usable primes below {limit}")
