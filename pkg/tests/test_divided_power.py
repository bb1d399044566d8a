import itertools
import math

import pytest
from hypothesis import given, strategies as st

from melikyan.divided_power import DividedPowerPoly, ShapeDescriptor, basis, deg_O, multiply, partial
from melikyan.finite_field import make_field, multi_binom

F = make_field(5, 1)
S11 = ShapeDescriptor((1, 1))
S21 = ShapeDescriptor((2, 1))


def mono(shape, a, c=1):
    return DividedPowerPoly.monomial(shape, F, a, c)


def coeff_oracle(a, b):
    """prod binom(a_i + b_i, a_i) mod 5 from factorials."""
    return math.prod(math.comb(x + y, x) for x, y in zip(a, b)) % 5


def test_shape():
    assert S11.tau == (4, 4) and S11.dim == 25
    assert S21.tau == (24, 4) and S21.dim == 125
    with pytest.raises(ValueError):
        S11.check_index((5, 0))
    with pytest.raises(ValueError):
        ShapeDescriptor(())


def test_basis():
    assert basis(ShapeDescriptor((1,))) == ((0,), (1,), (2,), (3,), (4,))
    b = basis(S11)
    assert len(b) == 25 and b[0] == (0, 0) and b[-1] == (4, 4)
    assert len(basis(S21)) == 125
    assert list(b) == sorted(b)


def test_multiply_examples():
    assert multiply(mono(S21, (1, 0)), mono(S21, (1, 0))) == mono(S21, (2, 0), 2)
    assert multiply(mono(S11, (4, 0)), mono(S11, (1, 0))).is_zero()
    assert multiply(mono(S11, (1, 1)), mono(S11, (2, 1))) == mono(S11, (3, 2), 1)


@pytest.mark.parametrize("shape", [S11, S21])
def test_truncation_soundness(shape):
    """Exponents leaving the box always carry, so the Lucas coefficient vanishes."""
    for a in shape.basis:
        for b in shape.basis:
            if any(x + y > t for x, y, t in zip(a, b, shape.tau)):
                assert multi_binom(a, b, 5) == 0


def test_products_match_factorial_oracle():
    for a in S11.basis:
        for b in S11.basis:
            got = multiply(mono(S11, a), mono(S11, b))
            s = tuple(x + y for x, y in zip(a, b))
            c = coeff_oracle(a, b) if all(v <= 4 for v in s) else 0
            want = mono(S11, s, c) if c else DividedPowerPoly.zero(S11, F)
            assert got == want


def test_commutative_associative_unit():
    one = DividedPowerPoly.constant(S11, F)
    B = [mono(S11, a) for a in S11.basis]
    for x in B:
        assert multiply(one, x) == x == multiply(x, one)
        for y in B:
            assert multiply(x, y) == multiply(y, x)
    for x, y, z in itertools.product(B, repeat=3):
        assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


def test_partial_examples():
    assert partial(1, mono(S11, (2, 1))) == mono(S11, (1, 1))
    assert partial(2, mono(S11, (1, 0))).is_zero()
    x1 = mono(S11, (1, 0))
    lhs = partial(1, multiply(x1, x1))
    rhs = multiply(partial(1, x1), x1) + multiply(x1, partial(1, x1))
    assert lhs == rhs == mono(S11, (1, 0), 2)
    with pytest.raises(IndexError):
        partial(3, x1)


def test_leibniz_and_commuting_partials():
    B = [mono(S11, a) for a in S11.basis]
    for f in B:
        assert partial(1, partial(2, f)) == partial(2, partial(1, f))
        for g in B:
            for i in (1, 2):
                assert partial(i, multiply(f, g)) == multiply(partial(i, f), g) + multiply(f, partial(i, g))


def test_deg_O():
    assert deg_O((0, 0)) == 0 and deg_O((1, 1)) == 2
    assert max(deg_O(a) for a in S11.basis) == 8


def test_no_stored_zeros():
    f = DividedPowerPoly(S11, F, {(1, 0): 3, (0, 1): 0})
    assert set(f.terms) == {(1, 0)}
    assert (f - f).terms == {}


def test_shape_mismatch():
    with pytest.raises(ValueError):
        multiply(mono(S11, (0, 0)), mono(S21, (0, 0)))


polys = st.dictionaries(st.sampled_from(S11.basis), st.integers(1, 4), max_size=6)


@given(polys, polys, polys)
def test_bilinearity(a, b, c):
    f, g, h = (DividedPowerPoly(S11, F, d) for d in (a, b, c))
    assert multiply(f + g, h) == multiply(f, h) + multiply(g, h)
    assert multiply(f.scale(3), g) == multiply(f, g).scale(3)
