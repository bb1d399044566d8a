import itertools
import random

import pytest

from melikyan.divided_power import DividedPowerPoly, ShapeDescriptor
from melikyan.finite_field import make_field
from melikyan.witt import TildeField, VectorField, apply, deg_W, divergence, tilde, untilde, witt_bracket

F = make_field(5, 1)
S = ShapeDescriptor((1, 1))


def m(a, c=1):
    return DividedPowerPoly.monomial(S, F, a, c)


def vf(a, i, c=1):
    return VectorField.basis_element(S, F, a, i, c)


W_BASIS = [vf(a, i) for i in (1, 2) for a in S.basis]


def test_apply_examples():
    assert apply(vf((0, 0), 1), m((1, 0))) == m((0, 0))
    assert apply(vf((1, 0), 1), m((0, 1))).is_zero()
    euler = vf((1, 0), 1) + vf((0, 1), 2)
    assert apply(euler, m((1, 1))) == m((1, 1), 2)


def test_bracket_examples():
    d1, x1d1 = vf((0, 0), 1), vf((1, 0), 1)
    assert witt_bracket(d1, x1d1) == d1
    assert witt_bracket(x1d1, x1d1).is_zero()
    assert witt_bracket(vf((1, 0), 2), vf((0, 1), 1)) == x1d1 - vf((0, 1), 2)


def test_bracket_is_commutator_of_derivations():
    """Oracle: [D, E] acts on O as D E - E D."""
    fs = [m(a) for a in S.basis]
    for D in W_BASIS:
        for E in W_BASIS:
            B = witt_bracket(D, E)
            for f in fs:
                assert apply(B, f) == apply(D, apply(E, f)) - apply(E, apply(D, f))


def test_antisymmetry_and_jacobi():
    for D, E in itertools.product(W_BASIS, repeat=2):
        assert witt_bracket(D, E) == -witt_bracket(E, D)
    rng = random.Random(3)
    for _ in range(3000):
        D, E, G = (rng.choice(W_BASIS) for _ in range(3))
        j = witt_bracket(D, witt_bracket(E, G)) + witt_bracket(E, witt_bracket(G, D)) + witt_bracket(G, witt_bracket(D, E))
        assert j.is_zero()


def test_degree_additivity():
    for D, E in itertools.product(W_BASIS, repeat=2):
        B = witt_bracket(D, E)
        dD = deg_W(next(a for c in D.components for a in c.terms))
        dE = deg_W(next(a for c in E.components for a in c.terms))
        for c in B.components:
            for a in c.terms:
                assert deg_W(a) == dD + dE


def test_divergence():
    assert divergence(vf((1, 0), 1)) == m((0, 0))
    assert divergence(vf((0, 0), 1)).is_zero()
    assert divergence(vf((2, 0), 1) + vf((1, 1), 2)) == m((1, 0), 2)
    rng = random.Random(5)
    for _ in range(300):
        D, E = rng.choice(W_BASIS), rng.choice(W_BASIS)
        lhs = divergence(witt_bracket(D, E))
        assert lhs == apply(D, divergence(E)) - apply(E, divergence(D))
    with pytest.raises(ValueError):
        divergence(VectorField.zero(ShapeDescriptor((1,)), F))


def test_tilde():
    d1 = vf((0, 0), 1)
    t = tilde(d1)
    assert isinstance(t, TildeField) and t.components == d1.components
    assert tilde(VectorField.zero(S, F)).is_zero()
    e = vf((1, 0), 1) + vf((0, 1), 2)
    assert untilde(tilde(e)) == e
    with pytest.raises(TypeError):
        t + d1


def test_deg_W():
    assert deg_W((0, 0)) == -1
    assert deg_W((1, 0), 2) == 0
    assert deg_W((4, 4)) == 7
