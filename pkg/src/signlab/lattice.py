"""Exact integer LLL reduction for the small lattices used here.

All arithmetic is on Python ints (Cohen's integral variant), so inputs with
hundreds of bits are reduced without any floating-point Gram-Schmidt.
"""

from __future__ import annotations

from fractions import Fraction


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis, delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """LLL-reduce the rows of ``basis`` (linearly independent integer vectors)."""
    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n <= 1:
        return b
    delta = Fraction(delta)
    dn, dd = delta.numerator, delta.denominator
    # 1-based bookkeeping: d[0] = 1, d[i] = Gram determinant of b_1..b_i
    d = [0] * (n + 1)
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[0] = 1
    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("zero vector in basis")
    k, k_max = 2, 1

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            bk, bl = b[k - 1], b[l - 1]
            for c in range(len(bk)):
                bk[c] -= q * bl[c]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, k_max + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k]
        d[k - 1] = B

    while k <= n:
        if k > k_max:
            k_max = k
            for j in range(1, k + 1):
                u = _dot(b[k - 1], b[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("basis vectors are linearly dependent")
                    d[k] = u
        while True:
            red(k, k - 1)
            if dd * d[k] * d[k - 2] < dn * d[k - 1] ** 2 - dd * lam[k][k - 1] ** 2:
                swap(k)
                k = max(2, k - 1)
            else:
                break
        for l in range(k - 2, 0, -1):
            red(k, l)
        k += 1
    return b


def gram_schmidt(basis) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Exact Gram-Schmidt vectors and coefficients ``mu[i][j]``."""
    bs: list[list[Fraction]] = []
    mu = [[Fraction(0)] * len(basis) for _ in basis]
    for i, row in enumerate(basis):
        v = [Fraction(x) for x in row]
        for j in range(i):
            denom = sum(x * x for x in bs[j])
            mu[i][j] = sum(Fraction(a) * c for a, c in zip(row, bs[j])) / denom
            v = [x - mu[i][j] * c for x, c in zip(v, bs[j])]
        bs.append(v)
    return bs, mu


def is_lll_reduced(basis, delta: Fraction = Fraction(99, 100)) -> bool:
    bs, mu = gram_schmidt(basis)
    norms = [sum(x * x for x in v) for v in bs]
    for i in range(len(basis)):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for i in range(1, len(basis)):
        if norms[i] < (Fraction(delta) - mu[i][i - 1] ** 2) * norms[i - 1]:
            return False
    return True
