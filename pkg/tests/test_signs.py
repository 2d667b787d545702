import csv
import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import count_points_brute, eta_oracle, first_negative_series
from signlab.coeffs import EllipticCurve, LinearCombination, linear_combo, oldform_shift
from signlab.errors import BoundError, ConfigError
from signlab.forms import build_table, get_form
from signlab.signs import (
    Remark4Result,
    first_negative,
    rankin_selberg_sums,
    remark1_check,
    remark2_check,
    remark4_experiment,
    sign_scan,
    supersingular_primes,
)


def test_sign_scan_same_form(e11_small):
    rep = sign_scan(e11_small, e11_small, 1, 2000)
    assert rep.negative == 0 and rep.first_negative is None
    assert rep.scanned == 2000


def test_sign_scan_first_negative(delta_small, e11_small):
    rep = sign_scan(delta_small, e11_small, 1, 100)
    oracle = first_negative_series(eta_oracle(((1, 24),), 100), eta_oracle(((1, 2), (11, 2)), 100))
    assert rep.first_negative == oracle == 3
    assert rep.witnesses[0] == (3, 252, -1)
    assert rep.positive + rep.negative + rep.zero == 100


def test_sign_scan_coprimality_filter(delta_small, e11_small):
    rep = sign_scan(delta_small, e11_small, 1, 500, q=11)
    assert all(n % 11 for n, _, _ in rep.witnesses)
    assert rep.scanned == sum(1 for n in range(1, 501) if n % 11)


def test_sign_scan_witnesses_and_csv(delta_small, e11_small):
    rep = sign_scan(delta_small, e11_small, 1, 300, max_witnesses=5)
    assert len(rep.witnesses) == 5
    for n, a, b in rep.witnesses:
        # recompute from the raw tables
        assert a == delta_small[n] and b == e11_small[n] and a * b < 0
    rows = list(csv.reader(io.StringIO(rep.witnesses_csv())))
    assert rows[0] == ["n", "a_f", "a_g", "sign"] and len(rows) == 6


def test_sign_scan_range_errors(e11_small):
    with pytest.raises(BoundError):
        sign_scan(e11_small, e11_small, 1, 2001)
    with pytest.raises(ConfigError):
        sign_scan(e11_small, e11_small, 5, 4)
    with pytest.raises(ConfigError):
        sign_scan(e11_small, e11_small, 1, 10, q=0)


def test_zero_is_its_own_class(e37b_small, e37a_small):
    rep = sign_scan(e37a_small, e37b_small, 1, 100)
    zeros = sum(1 for n in range(1, 101) if e37a_small[n] * e37b_small[n] == 0)
    assert rep.zero == zeros


def test_real_table_signs(e37a_small, e37b_small):
    f = linear_combo(LinearCombination((e37a_small, e37b_small), (1.0, math.pi)))
    rep = sign_scan(f, e37a_small, 1, 2000)
    exact = sum(1 for n in range(1, 2001) if (e37a_small[n] + math.pi * e37b_small[n]) * e37a_small[n] < 0)
    assert rep.negative == exact


# -- remarks -----------------------------------------------------------


@pytest.mark.parametrize("D", [5, -4, 8, -3, 13])
def test_remark1_any_discriminant(e11_small, D):
    rep = remark1_check(e11_small, D, 2000)
    assert rep.ok


def test_remark1_nonresidue_index(e11_small):
    rep = remark1_check(e11_small, 5, 2000)
    assert rep.ok
    # n = 2 has (5/2) = -1: product is a_f(2)^2 * 1
    assert e11_small[2] * (2 * e11_small[2] - e11_small[2]) == e11_small[2] ** 2


def test_supersingular_examples():
    assert supersingular_primes(EllipticCurve(0, 0, 0, 1, 0), 10) == [7]
    assert count_points_brute((0, 0, 0, 1, 0), 7) == 8
    c11 = get_form("11a").curve
    ss = supersingular_primes(c11, 1000)
    assert supersingular_primes(c11, ss[0] - 1) == []
    assert count_points_brute(c11.ainvs, ss[0]) == ss[0] + 1
    with pytest.raises(ConfigError):
        supersingular_primes(c11, 4)


def test_remark2(e11_small):
    p = supersingular_primes(get_form("11a").curve, 1000)[0]
    rep = remark2_check(e11_small, p, 2000)
    assert rep.ok and rep.extra["square_identity_failures"] == 0
    g = oldform_shift(e11_small, p)
    assert e11_small[p] * g[p] == 0
    with pytest.raises(ConfigError):
        remark2_check(e11_small, 7, 2000)


def test_remark4_small(e37a_small, e37b_small):
    res = remark4_experiment(e37a_small, e37b_small, [1.0, 0.5, 0.25], 2000)
    assert len(res.first_negative) == 3
    same = remark4_experiment(e37a_small, e37b_small, [1.0, 0.5, 0.25], 2000, scale=7.5)
    assert same.first_negative == res.first_negative
    zero = remark4_experiment(e37a_small, e37b_small, [0.0], 2000)
    assert zero.first_negative == [None]


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 100))
def test_remark4_scale_invariance(scale):
    a, b = build_table("37a", 2000), build_table("37b", 2000)
    base = remark4_experiment(a, b, [0.5, 0.125], 2000)
    assert remark4_experiment(a, b, [0.5, 0.125], 2000, scale=scale).first_negative == base.first_negative


def test_remark4_validation(e37a_small, e11_small):
    with pytest.raises(ConfigError):
        remark4_experiment(e37a_small, e37a_small, [1.0], 100)
    with pytest.raises(ConfigError):
        remark4_experiment(e37a_small, e11_small, [1.0], 100)
    with pytest.raises(ConfigError):
        remark4_experiment(e37a_small, build_table("37b", 2000), [0.5, 1.0], 100)


def test_remark4_trend_logic():
    r = Remark4Result("a", "b", 10, [1, 0.5, 0.25, 0.125], [3, 3, 9, None])
    assert r.merged() == [3, 9, math.inf] and r.trend_ok
    assert not Remark4Result("a", "b", 10, [1, 0.5], [5, 4]).trend_ok
    assert not Remark4Result("a", "b", 10, [1, 0.5], [5, 5]).trend_ok


# -- partial sums ------------------------------------------------------


def test_partial_sums(delta_small, e11_small):
    s = rankin_selberg_sums(delta_small, e11_small, [100, 1000, 2000])
    for series in (s.square, s.negative, s.harmonic):
        assert all(x <= y for x, y in zip(series, series[1:]))
    assert all(n <= h for n, h in zip(s.negative, s.harmonic))
    # independent recomputation at x = 100
    ps = [p for p in range(2, 101) if all(p % q for q in range(2, p)) and p != 11]
    ref = sum(delta_small[p] / p**5.5 * e11_small[p] / p**0.5 / p for p in ps)
    assert s.cross[0] == pytest.approx(ref, abs=1e-12)
    assert s.harmonic[0] == pytest.approx(sum(1 / p for p in ps), abs=1e-12)
    assert s.ratio()[0] == pytest.approx(32 * s.negative[0] / s.harmonic[0])
    assert s.to_csv().splitlines()[0] == "x,cross,square,negative,harmonic,ratio"
