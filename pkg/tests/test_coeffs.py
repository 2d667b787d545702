import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import count_points_brute, eta_oracle, is_prime_trial
from signlab.coeffs import (
    CoeffTable,
    EllipticCurve,
    EtaProduct,
    FormSpec,
    LinearCombination,
    character_values,
    count_points_bsgs,
    count_points_enumerate,
    deligne_violations,
    ec_ap,
    ec_ap_table,
    ec_bad_ap,
    eta_expand,
    euler_power,
    hecke_extend,
    is_fundamental_discriminant,
    kronecker,
    linear_combo,
    multiplicativity_failures,
    oldform_shift,
    pentagonal_terms,
    prime_power_coefficient,
    table_from_list,
    twist,
)
from signlab.errors import BadReductionError, BoundError, ConfigError, MissingCoefficientError
from signlab.forms import build_table, get_form
from signlab.primes import factor, is_prime, primes_upto, smallest_prime_factor

C11 = EllipticCurve(0, -1, 1, -10, -20)
C37A = EllipticCurve(0, 0, 1, -1, 0)
C37B = EllipticCurve(0, 1, 1, -23, -50)


# -- primes ----------------------------------------------------------------


def test_primes_against_trial_division():
    assert primes_upto(200).tolist() == [n for n in range(201) if is_prime_trial(n)]
    assert len(primes_upto(10**5)) == 9592


@given(st.integers(min_value=-5, max_value=10**7))
def test_is_prime_matches_trial(n):
    if n < 10**5:
        assert is_prime(n) == is_prime_trial(n)
    else:
        assert is_prime(n) == (n > 1 and all(n % p for p in primes_upto(math.isqrt(n)).tolist()))


def test_large_is_prime_miller_rabin():
    assert is_prime(1_000_000_007)
    assert not is_prime(1_000_000_007 * 998_244_353)


@given(st.integers(min_value=1, max_value=10**6))
def test_factor_roundtrip(n):
    assert math.prod(p**e for p, e in factor(n)) == n
    assert all(is_prime_trial(p) for p, _ in factor(n))


def test_spf_read_only():
    spf = smallest_prime_factor(100)
    assert spf[91] == 7
    with pytest.raises(ValueError):
        spf[2] = 3


# -- eta products --------------------------------------------------------


def test_pentagonal_terms():
    # prod (1 - q^n) = 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
    assert pentagonal_terms(15) == [(1, -1), (2, -1), (5, 1), (7, 1), (12, -1), (15, -1)]


def test_euler_power_matches_oracle_and_inverts():
    dense = eta_oracle(((1, 24),), 60)
    # eta^24 = q * P^24, so P^24 coefficients are a(1..)
    assert list(euler_power(24, 59)) == dense
    P, Pinv = euler_power(1, 40), euler_power(-1, 40)
    conv = [sum(P[i] * Pinv[n - i] for i in range(n + 1)) for n in range(41)]
    assert conv == [1] + [0] * 40


def test_partition_numbers_from_inverse():
    # 1 / prod (1 - q^n) generates the partition numbers
    assert list(euler_power(-1, 10)) == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_eta_examples():
    assert eta_expand(EtaProduct(((1, 24),)), 5) == [1, -24, 252, -1472, 4830]
    assert eta_expand(EtaProduct(((1, 2), (11, 2))), 6) == [1, -2, -1, 2, 1, 2]
    assert eta_expand(EtaProduct(((1, 24),)), 1) == [1]


def _product_series(m, N):
    """prod_{n>=1} (1 - q^(m n)) through q^N by direct multiplication."""
    P = [1] + [0] * N
    for n in range(1, N // m + 1):
        for i in range(N, m * n - 1, -1):
            P[i] -= P[i - m * n]
    return P


def test_eta_quotient_with_negative_exponent():
    # eta(2z)^16 / eta(z)^8 = q * P(q^2)^16 / P(q)^8; check P(q)^8 * series == P(q^2)^16
    N = 60
    got = eta_expand(EtaProduct(((1, -8), (2, 16))), N + 1)
    series = got  # coefficient of q^(i+1)
    P1, P2 = _product_series(1, N), _product_series(2, N)

    def mul(a, b):
        return [sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(N + 1)]

    lhs = [1] + [0] * N
    for _ in range(8):
        lhs = mul(lhs, P1)
    lhs = mul(lhs, series[: N + 1])
    rhs = [1] + [0] * N
    for _ in range(16):
        rhs = mul(rhs, P2)
    assert lhs == rhs


@pytest.mark.parametrize("factors", [((1, 1),), ((1, 12), (2, 1)), ((1, 23), (1, 1), (1, -48))])
def test_eta_rejects_non_integral_order(factors):
    with pytest.raises(ConfigError):
        eta_expand(EtaProduct(factors), 10)


def test_eta_rejects_zero_bound():
    with pytest.raises(ConfigError):
        eta_expand(EtaProduct(((1, 24),)), 0)


# -- elliptic curves ---------------------------------------------------


@pytest.mark.parametrize("E", [C11, C37A, C37B, EllipticCurve(1, 0, 1, 4, -6)])
def test_enumeration_matches_brute_force(E):
    for p in primes_upto(150).tolist():
        if E.has_good_reduction(p):
            assert count_points_enumerate(E, p) == count_points_brute(E.ainvs, p), p


@pytest.mark.parametrize("p", [2003, 2011, 10007, 65537, 99991])
def test_bsgs_matches_enumeration(p):
    for E in (C11, C37A, C37B):
        assert count_points_bsgs(E, p) == count_points_enumerate(E, p)


def test_known_ap():
    assert [ec_ap(C11, p) for p in (2, 3, 5, 7)] == [-2, -1, 1, -2]
    assert [ec_ap(C37A, p) for p in (2, 3, 5, 7)] == [-2, -3, -2, -1]
    assert [ec_ap(C37B, p) for p in (2, 3, 5, 7)] == [0, 1, 0, -1]


def test_bad_reduction():
    with pytest.raises(BadReductionError):
        ec_ap(C11, 11)
    assert ec_bad_ap(C11, 11) == 1
    assert ec_bad_ap(C37A, 37) == -1
    assert ec_bad_ap(C37B, 37) == 1


def test_hasse_and_parallel_table():
    ps = [p for p in primes_upto(3000).tolist() if p != 37]
    serial = ec_ap_table(C37A, ps)
    assert all(abs(a) <= 2 * math.sqrt(p) for p, a in serial.items())
    assert ec_ap_table(C37A, ps, workers=2) == serial


def test_ap_rng_is_deterministic():
    assert ec_ap(C37B, 999983, method="bsgs") == ec_ap(C37B, 999983, method="bsgs")


# -- Hecke structure ------------------------------------------------------


def test_prime_power_recursion():
    # tau(4) = tau(2)^2 - 2^11, tau(8) = tau(2) tau(4) - 2^11 tau(2)
    assert prime_power_coefficient(-24, 2, 12, 2) == -1472
    assert prime_power_coefficient(-24, 2, 12, 3) == 84480
    assert prime_power_coefficient(1, 11, 2, 3, bad=True) == 1
    assert prime_power_coefficient(5, 7, 2, 0) == 1


def test_hecke_extend_matches_eta(delta_small):
    aps = {p: delta_small[p] for p in primes_upto(2000).tolist()}
    t = hecke_extend(1, 12, {}, aps, 2000)
    assert t.a == delta_small.a


def test_hecke_extend_missing():
    with pytest.raises(MissingCoefficientError):
        hecke_extend(11, 2, {11: 1}, {2: -2, 3: -1}, 10)


def test_multiplicative_and_deligne(e37a_small, delta_small):
    assert multiplicativity_failures(e37a_small, 300) == []
    assert multiplicativity_failures(delta_small, 300) == []
    assert deligne_violations(delta_small) == []


def test_table_bounds(e11_small):
    with pytest.raises(BoundError):
        e11_small[2001]
    with pytest.raises(BoundError):
        e11_small[0]


def test_formspec_validation():
    with pytest.raises(ConfigError):
        FormSpec(0, 2, "x")
    with pytest.raises(ConfigError):
        FormSpec(11, 3, "x")


# -- characters, twists, combinations ----------------------------------


def test_fundamental_discriminants():
    fund = [d for d in range(-30, 31) if is_fundamental_discriminant(d)]
    assert fund == [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 1, 5, 8, 12, 13, 17, 21, 24, 28, 29]


@pytest.mark.parametrize("D", [5, -4, 8, -3, 12, 13])
def test_kronecker_is_multiplicative_character(D):
    chi = character_values(D, 1600)
    for m in range(1, 40):
        for n in range(1, 40):
            assert chi[m * n] == chi[m] * chi[n]
    assert all(chi[n] == 0 for n in range(1, 1600) if math.gcd(n, D) > 1)
    # period |D|
    assert all(chi[n] == chi[n + abs(D)] for n in range(1, 1600 - abs(D)))


def test_kronecker_euler_criterion():
    for p in primes_upto(200).tolist():
        if p > 2 and p != 5:
            assert kronecker(5, p) == (1 if pow(5, (p - 1) // 2, p) == 1 else -1)


def test_twist_and_shift(e11_small):
    t = twist(e11_small, 5)
    assert t.level == 275
    assert all(t[n] == e11_small[n] * kronecker(5, n) for n in range(1, 500))
    assert twist(e11_small, 1) is e11_small
    g = oldform_shift(e11_small, 19)
    assert g.level == 209 and not g.eigenform
    assert g[19] == e11_small[19] + 1
    assert g[38] == e11_small[38] + e11_small[2]


def test_linear_combo_exact_and_real(e37a_small, e37b_small):
    c = linear_combo(LinearCombination((e37a_small, e37b_small), (2, -3)))
    assert c.integral and c[7] == 2 * e37a_small[7] - 3 * e37b_small[7]
    r = linear_combo(LinearCombination((e37a_small, e37b_small), (1.0, math.pi)))
    assert not r.integral
    assert abs(r[3] - (-3 + math.pi)) < 1e-12
    assert r.scale[3] == pytest.approx(3 + math.pi)
    with pytest.raises(ConfigError):
        linear_combo(LinearCombination((e37a_small, build_table("11a", 2000)), (1, 1)))
    with pytest.raises(ConfigError):
        LinearCombination((e37a_small,), (0,))


def test_real_table_zero_band(e37a_small):
    # (1, -1) on identical columns: cancellation lands inside the zero band
    r = linear_combo(LinearCombination((e37a_small, e37a_small), (0.1, -0.1)))
    assert set(r.signs.tolist()) == {0}


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=60), st.integers(min_value=2, max_value=60))
def test_eigenform_multiplicativity_property(m, n):
    t = build_table("11a", 2000)
    if math.gcd(m, n) == 1 and m * n <= 2000:
        assert t[m * n] == t[m] * t[n]
