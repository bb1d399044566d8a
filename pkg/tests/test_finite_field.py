import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from melikyan.finite_field import (
    CharacteristicError,
    FieldElement,
    FieldError,
    FieldTooSmall,
    binom_mod_p,
    embedding,
    extend_degree,
    extend_field,
    make_field,
    multi_binom,
    root_of_unity,
)


def gf25_mul_oracle(a, b):
    """(a0 + a1 x)(b0 + b1 x) with x^2 = -2, written out by hand."""
    c0 = a[0] * b[0] - 2 * a[1] * b[1]
    c1 = a[0] * b[1] + a[1] * b[0]
    return (c0 % 5, c1 % 5)


def test_prime_field():
    F = make_field(5, 1)
    assert F.order == 5 and F.k == 1
    assert [int(x) for x in F.elements()] == [0, 1, 2, 3, 4]


def test_gf25_modulus_is_smallest_irreducible():
    F = make_field(5, 2)
    assert F.order == 25
    # monic x^2 + b x + c ordered by (b, c); irreducible iff no root mod 5
    for b, c in itertools.product(range(5), repeat=2):
        if all((r * r + b * r + c) % 5 for r in range(5)):
            break
    assert tuple(F.modulus) == (c, b, 1)


def test_modulus_deterministic():
    assert make_field(5, 3).modulus == make_field(5, 3).modulus
    assert tuple(make_field(5, 6).modulus) == (2, 1, 0, 0, 0, 0, 1)


def test_gf25_multiplication_against_oracle(F25):
    for a in F25.elements():
        for b in F25.elements():
            assert (a * b).coords == gf25_mul_oracle(a.coords, b.coords)


def test_gf25_inverses_and_orders(F25):
    one = F25.one
    for x in F25.nonzero_elements():
        assert x * x.inverse() == one
        assert x ** 24 == one
    gens = [x for x in F25.nonzero_elements() if x.multiplicative_order() == 24]
    assert len(gens) == 8  # Euler phi(24)


def test_bad_parameters():
    with pytest.raises(FieldError):
        make_field(6, 1)
    with pytest.raises(FieldError):
        make_field(5, 0)


def test_cross_field_arithmetic_rejected(F5, F25):
    with pytest.raises(FieldError):
        F5.one + F25.one


def test_root_of_unity(F5, F25):
    assert root_of_unity(F5, 1) == F5.one
    b = root_of_unity(F25, 3)
    assert b ** 3 == F25.one and b != F25.one and b * b + b + F25.one == F25.zero
    with pytest.raises(CharacteristicError):
        root_of_unity(F25, 5)
    with pytest.raises(FieldTooSmall):
        root_of_unity(F5, 3)
    for m in (1, 2, 3, 4, 6, 8, 12, 24):
        z = root_of_unity(F25, m)
        assert z ** m == F25.one
        assert all(z ** d != F25.one for d in range(1, m) if m % d == 0)


def test_extend_field(F5, F25):
    assert extend_field(F5, 3)[0].order == 25
    assert extend_field(F5, 2)[0] == F5
    assert extend_field(F25, 7)[0].k == 6
    with pytest.raises(CharacteristicError):
        extend_field(F25, 10)


def test_embedding_is_ring_homomorphism(F25):
    big, emb = extend_field(F25, 7)
    rng = random.Random(1)
    elems = list(F25.elements())
    for _ in range(100):
        a, b = rng.choice(elems), rng.choice(elems)
        assert emb(a + b) == emb(a) + emb(b)
        assert emb(a * b) == emb(a) * emb(b)
    assert emb(F25.one) == big.one


def test_embedding_chain_consistent(F5):
    F6, e16 = extend_degree(F5, 6)
    assert all(e16(x).in_prime_field() and int(e16(x)) == int(x) for x in F5.elements())
    e26 = embedding(make_field(5, 2), F6)
    x = make_field(5, 2).generator
    # the image of the generator is a root of the source modulus
    g = make_field(5, 2).modulus
    r = e26(x)
    acc = F6.zero
    for c in reversed(g):
        acc = acc * r + F6.element(c)
    assert acc == F6.zero


@pytest.mark.parametrize("a,b,expected", [(2, 1, 2), (5, 1, 0), (7, 3, 0)])
def test_binom_examples(a, b, expected):
    assert binom_mod_p(a, b, 5) == expected


def test_binom_matches_factorials():
    rng = random.Random(7)
    for _ in range(2000):
        a = rng.randrange(0, 10**4)
        b = rng.randrange(0, 10**4)
        assert binom_mod_p(a, b, 5) == math.comb(a, b) % 5
    for a in range(60):
        for b in range(60):
            assert binom_mod_p(a, b, 5) == math.comb(a, b) % 5


@pytest.mark.parametrize("a,b,expected", [((1, 0), (1, 0), 2), ((4, 0), (4, 0), 0), ((1, 1), (2, 1), 1)])
def test_multi_binom(a, b, expected):
    assert multi_binom(a, b, 5) == expected


def test_multi_binom_length_mismatch():
    with pytest.raises(ValueError):
        multi_binom((1,), (1, 2), 5)


@given(st.integers(0, 24), st.integers(0, 24), st.integers(0, 24))
def test_field_axioms(i, j, l):
    F = make_field(5, 2)
    a, b, c = F.from_index(i), F.from_index(j), F.from_index(l)
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == F.zero


def test_vectorised_multiplication_matches_scalar(F25):
    elems = list(F25.elements())
    A = np.array([x.coords for x in elems])
    prod = F25.mul_arrays(A[:, None, :], A[None, :, :])
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            assert tuple(prod[i, j]) == (x * y).coords
