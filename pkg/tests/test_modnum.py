from __future__ import annotations

import math

import pytest
from hypothesis import assume, given, strategies as st

from qafrft.errors import EvenModulus, NotInvertible
from qafrft.modnum import (
    Modulus,
    Residue,
    ceil_log,
    digits,
    from_digits,
    half_mod,
    is_prime,
    mod_inv,
    mod_pow,
    p_adic_split,
)


def brute_inverse(x: int, N: int) -> int:
    return next(y for y in range(N) if x * y % N == 1)


@pytest.mark.parametrize("x, N, want", [(6, 11, 2), (10, 11, 10), (2, 9, 5)])
def test_mod_inv_examples(x, N, want):
    assert mod_inv(x, N) == want
    assert brute_inverse(x, N) == want


@pytest.mark.parametrize("x, N, g", [(3, 9, 3), (0, 11, 11), (10, 25, 5)])
def test_mod_inv_reports_gcd(x, N, g):
    with pytest.raises(NotInvertible) as info:
        mod_inv(x, N)
    assert info.value.gcd == g
    assert info.value.modulus == N


@pytest.mark.parametrize("N, want", [(11, 6), (9, 5), (3, 2)])
def test_half_mod(N, want):
    assert half_mod(N) == want
    assert 2 * want % N == 1


def test_half_mod_rejects_even():
    with pytest.raises(EvenModulus):
        half_mod(16)


@pytest.mark.parametrize("lam, p, want", [(6, 3, (2, 1)), (7, 3, (7, 0)), (24, 2, (3, 3))])
def test_p_adic_split_examples(lam, p, want):
    assert p_adic_split(lam, p) == want


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_p_adic_split_brute_force(p):
    for lam in range(1, 10_001):
        g, s = p_adic_split(lam, p)
        assert g * p**s == lam
        assert g % p != 0


@pytest.mark.parametrize("x, e, N, want", [(2, 5, 11, 10), (7, 0, 13, 1), (10, 2, 11, 1)])
def test_mod_pow(x, e, N, want):
    assert mod_pow(x, e, N) == want


@given(st.sampled_from([9, 11, 25, 27, 49, 121, 243]), st.integers(min_value=0, max_value=10**6))
def test_inverse_is_involution(N, x):
    assume(math.gcd(x, N) == 1)
    y = mod_inv(x, N)
    assert x * y % N == 1
    assert mod_inv(y, N) == x % N


@given(st.integers(min_value=0, max_value=500).map(lambda k: 2 * k + 3))
def test_half_mod_property(N):
    assert 2 * half_mod(N) % N == 1


def test_residue_normalizes_negatives():
    assert Residue(-5, 11).value == 6
    r = Residue(3, 11)
    assert int(r * Residue(-5, 11)) == 7
    assert r.inverse().value == 4
    assert int(r**5) == pow(3, 5, 11)


def test_modulus_checks_primality():
    assert Modulus(3, 2).N == 9
    with pytest.raises(ValueError):
        Modulus(9, 1)
    with pytest.raises(ValueError):
        Modulus(3, 0)


def test_primes():
    assert [m for m in range(30) if is_prime(m)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.integers(min_value=0, max_value=3**7 - 1))
def test_digit_round_trip(x):
    ds = digits(x, 3, 7)
    assert ds[0] == x % 3
    assert from_digits(ds, 3) == x


@pytest.mark.parametrize("lam, p, want", [(1, 3, 0), (6, 3, 2), (9, 3, 2), (10, 3, 3), (5, 2, 3)])
def test_ceil_log(lam, p, want):
    assert ceil_log(lam, p) == want
