from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from qafrft.errors import ModulusMismatch, NoFourierPower, UnsupportedModulus
from qafrft.sl2 import (
    Mat2Z,
    R,
    SO2Element,
    all_generators,
    decompose_sl2,
    decompose_so2,
    element_order,
    epsilon,
    find_generator,
    fourier_power,
    identity,
    mat2_mul,
    mat2_pow,
    so2_elements,
    so2_group_order,
)


def naive_mul(A, B, N):
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return ((a * e + b * g) % N, (a * f + b * h) % N), ((c * e + d * g) % N, (c * f + d * h) % N)


def test_epsilon_squared_is_minus_identity():
    assert epsilon(11) @ epsilon(11) == Mat2Z(10, 0, 0, 10, 11)


def test_generator_cube_is_epsilon():
    g = SO2Element(3, -5, 11)
    cube = mat2_pow(g.matrix, 3)
    assert cube.rows() == ((0, 10), (1, 0))
    # the same check by hand-rolled multiplication
    M = g.matrix.rows()
    assert naive_mul(naive_mul(M, M, 11), M, 11) == ((0, 10), (1, 0))


def test_transposed_generator_cube_is_epsilon_cubed():
    # [[3, -5], [5, 3]] is the transpose of the rotation (3, -5): its cube is eps^-1
    A = Mat2Z(3, -5, 5, 3, 11)
    assert A**3 == epsilon(11) ** 3


def test_identity_product():
    A = Mat2Z(2, 3, 5, 8, 11)
    assert A @ identity(11) == A


def test_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        mat2_mul(identity(5), identity(7))


@pytest.mark.parametrize("A, want", [
    (epsilon(7), 4),
    (epsilon(25), 4),
    (Mat2Z(1, 0, 1, 1, 11), 11),
    (SO2Element(3, -5, 11).matrix, 12),
    (Mat2Z(3, -5, 5, 3, 11), 12),
])
def test_element_order(A, want):
    assert element_order(A) == want


@pytest.mark.parametrize("p, n, want", [(11, 1, 12), (5, 1, 4), (3, 2, 12), (7, 2, 56), (13, 1, 12)])
def test_group_order_formula(p, n, want):
    assert so2_group_order(p, n) == want


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("n", [1, 2])
def test_group_order_brute_force(p, n):
    N = p**n
    count = sum((a * a + b * b) % N == 1 for a in range(N) for b in range(N))
    assert count == so2_group_order(p, n) == len(so2_elements(N))


def test_group_order_rejects_two():
    with pytest.raises(UnsupportedModulus):
        so2_group_order(2, 3)


def test_generators_mod_11():
    gens = {(g.a, g.b) for g in all_generators(11)}
    assert len(gens) == 4
    assert (3, 6) in gens  # (3, -5)
    assert find_generator(11) == SO2Element(3, 5, 11)


def test_generator_mod_5():
    g = find_generator(5)
    assert g.order() == 4
    assert len(so2_elements(5)) == 4


@pytest.mark.parametrize("p, n", [(3, 1), (3, 2), (5, 2), (7, 1), (11, 1), (13, 1), (3, 3)])
@pytest.mark.parametrize("strategy", ["exhaustive", "random"])
def test_find_generator_has_full_order(p, n, strategy):
    g = find_generator(p, n, strategy=strategy, seed=7)
    T = so2_group_order(p, n)
    assert g.order() == T
    assert (g ** T).matrix == identity(p**n)
    quarter = (g ** (T // 4)).matrix
    assert quarter in (epsilon(p**n), epsilon(p**n) ** 3)


def test_random_strategy_is_reproducible():
    assert find_generator(13, 2, "random", seed=3) == find_generator(13, 2, "random", seed=3)


def test_fourier_power_examples():
    assert fourier_power(SO2Element(3, -5, 11)).m == 3
    assert fourier_power(SO2Element(0, 1, 11)).m == 1
    with pytest.raises(NoFourierPower):
        fourier_power(SO2Element(1, 0, 11))


@pytest.mark.parametrize("p, n", [(3, 1), (3, 2), (5, 1), (7, 2), (11, 1), (13, 1)])
def test_fourier_power_of_generators(p, n):
    T = so2_group_order(p, n)
    for g in all_generators(p, n):
        fp = fourier_power(g)
        assert fp.group_order == T
        assert fp.m in (T // 4, 3 * T // 4)
        assert (g ** fp.m).matrix == epsilon(p**n)


def test_decompose_generator():
    dec = decompose_so2(SO2Element(3, -5, 11))
    assert [str(f) for f in dec.factors] == ["R(6)", "D(2)", "eps", "R(6)"]
    assert not dec.fallback_used
    assert dec.product() == SO2Element(3, -5, 11).matrix


def test_decompose_epsilon():
    dec = decompose_sl2(epsilon(11))
    assert dec.params == {"x": 0, "y": 1, "z": 0}
    assert decompose_so2(SO2Element(0, 1, 11)).params == dec.params


def test_decompose_lower_translation():
    A = Mat2Z(1, 0, 1, 1, 11)
    dec = decompose_sl2(A)
    assert [str(f) for f in dec.factors] == ["R(1)", "D(1)", "eps", "R(1)"]
    assert dec.product() == A


def test_decompose_upper_translation_uses_fallback():
    A = R(4, 11)
    dec = decompose_sl2(A)
    assert dec.fallback_used
    assert dec.factors[-1].kind == "eps"
    assert dec.product() == A


def test_decompose_identity_and_minus_identity():
    dec = decompose_so2(SO2Element(1, 0, 9))
    assert dec.identity and dec.factors == ()
    minus = decompose_so2(SO2Element(-1, 0, 9))
    assert minus.fallback_used
    assert minus.product() == Mat2Z(-1, 0, 0, -1, 9)


def test_decompose_rotation_with_zero_divisor_b():
    # b = 3 shares a factor with 9, so the lower-left entry is not a unit
    g = next(g for g in so2_elements(9) if g.b % 3 == 0 and g.b != 0)
    dec = decompose_so2(g)
    assert dec.fallback_used
    assert dec.product() == g.matrix


def random_sl2(N, rng):
    while True:
        a, b, c = (rng.randrange(N) for _ in range(3))
        for d in range(N):
            if (a * d - b * c) % N == 1:
                return Mat2Z(a, b, c, d, N)


@pytest.mark.parametrize("N", [9, 11, 25, 27])
def test_decomposition_soundness(N):
    rng = random.Random(N)
    for _ in range(1000):
        A = random_sl2(N, rng)
        assert decompose_sl2(A).product() == A


@settings(max_examples=60)
@given(st.sampled_from([9, 11, 25, 27]), st.data())
def test_so2_closure_and_commutativity(N, data):
    elems = so2_elements(N)
    g = data.draw(st.sampled_from(elems))
    h = data.draw(st.sampled_from(elems))
    gh = g * h
    assert isinstance(gh, SO2Element)
    assert gh == h * g
    assert gh.matrix.is_sl2


@pytest.mark.parametrize("p, n", [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)])
def test_lagrange(p, n):
    T = so2_group_order(p, n)
    for g in so2_elements(p**n):
        assert T % g.order() == 0
