import random

import numpy as np
import pytest

from melikyan.finite_field import make_field
from melikyan.linalg import FMatrix
from melikyan.melikyan import (
    BasisIndex,
    MelikyanElement,
    antisymmetry_failures,
    basis_element,
    canonical_basis,
    deg_canonical,
    deg_standard,
    deg_zz,
    filtration_component,
    grading_failures_zz,
    ideal_dimension,
    jacobi_failures,
    m_bracket,
    melikyan_shape,
)
from melikyan.divided_power import ShapeDescriptor

F = make_field(5, 1)


@pytest.fixture(scope="module")
def S():
    return melikyan_shape(1, 1)


def e(S, block, a, c=1):
    return basis_element(S, F, BasisIndex(block, a), c)


def test_dimensions(S):
    assert len(canonical_basis(S)) == 125
    assert len(canonical_basis(melikyan_shape(2, 1))) == 625
    blocks = [b.block for b in canonical_basis(S)]
    assert blocks == sorted(blocks, key=["O", "W1", "W2", "T1", "T2"].index)


def test_rejects_other_primes():
    with pytest.raises(ValueError):
        canonical_basis(ShapeDescriptor((1, 1), 7))


def test_bracket_examples(S):
    one = e(S, "O", (0, 0))
    assert m_bracket(e(S, "T1", (0, 0)), e(S, "T2", (0, 0))) == one
    assert m_bracket(e(S, "W1", (0, 0)), e(S, "O", (1, 0))) == one
    assert m_bracket(e(S, "O", (1, 0)), e(S, "O", (0, 1))) == e(S, "T2", (0, 1), 3) + e(S, "T1", (1, 0), 3)
    assert m_bracket(one, e(S, "T1", (0, 0))) == e(S, "W1", (0, 0))
    assert m_bracket(e(S, "W1", (1, 0)), e(S, "O", (1, 0))) == e(S, "O", (1, 0), 4)


def test_antisymmetric_completion(S):
    D, f, E = e(S, "W1", (1, 1)), e(S, "O", (2, 0)), e(S, "T2", (0, 3))
    for a, b in ((D, f), (D, E), (f, E)):
        assert m_bracket(b, a) == -m_bracket(a, b)


def test_degrees(S):
    d1, one, t = BasisIndex("W1", (0, 0)), BasisIndex("O", (0, 0)), BasisIndex("T2", (1, 1))
    assert deg_zz(d1) == (-3, 0) and deg_zz(one) == (-1, -1) and deg_zz(t) == (4, 1)
    assert deg_standard(d1) == (-1, 0) and deg_standard(one) == (0, -1) and deg_standard(t) == (1, 1)
    assert deg_canonical(d1) == -3 and deg_canonical(BasisIndex("T1", (0, 0))) == -1 and deg_canonical(one) == -2


def test_degree_relations(S):
    for b in canonical_basis(S):
        u, v = deg_zz(b)
        i, j = deg_standard(b)
        assert (3 * i + j, j) == (u, v)
        assert deg_canonical(b) == u + v == 3 * i + 2 * j
        assert (u % 3 == 0 and v % 3 == 0) == (b.block in ("W1", "W2"))


def test_filtration(S):
    assert len(filtration_component(-100, S)) == 125
    assert filtration_component(100, S) == []
    degs = [deg_canonical(b) for b in canonical_basis(S)]
    assert (min(degs), max(degs)) == (-3, 23)
    top = filtration_component(23, S)
    assert set(top) == {BasisIndex("T1", (4, 4)), BasisIndex("T2", (4, 4))}


def test_table_matches_direct_bracket(S, T11):
    basis = canonical_basis(S)
    rng = random.Random(11)
    for _ in range(300):
        i, j = rng.randrange(125), rng.randrange(125)
        direct = m_bracket(basis_element(S, F, basis[i]), basis_element(S, F, basis[j]))
        vec = direct.to_vector().to_ints()[0]
        expected = np.zeros(125, dtype=np.int64)
        for m, v in T11.bracket_indices(i, j).items():
            expected[m] = v
        assert (vec == expected).all()


def test_bilinear_bracket_of_vectors(S, T11):
    F25 = make_field(5, 2)
    rng = np.random.default_rng(0)
    for _ in range(5):
        y = FMatrix(F25, rng.integers(0, 5, size=(1, 125, 2)))
        z = FMatrix(F25, rng.integers(0, 5, size=(1, 125, 2)))
        ey, ez = MelikyanElement.from_vector(S, y), MelikyanElement.from_vector(S, z)
        assert m_bracket(ey, ez).to_vector() == T11.brackets_of_vectors(y, z)
        # ad y acts on columns
        assert T11.ad(y) @ z.T == T11.brackets_of_vectors(y, z).T


def test_anticommutativity_and_grading(T11):
    assert antisymmetry_failures(T11) == []
    assert grading_failures_zz(T11) == []


def test_jacobi_random_and_control(T11):
    rng = np.random.default_rng(0)
    triples = rng.integers(0, 125, size=(20000, 3))
    assert jacobi_failures(T11, triples) == []
    # control: a perturbed table must be caught
    from melikyan.melikyan import StructureTable

    V = T11.V.copy()
    V[17] = (V[17] + 1) % 5 or 1
    bad = StructureTable(T11.shape, T11.I, T11.J, T11.M, V)
    assert jacobi_failures(bad, triples)


def test_ideal_closure_samples(T11):
    for i in (0, 30, 60, 124):
        assert ideal_dimension(T11, i) == 125


def test_element_roundtrip(S):
    F25 = make_field(5, 2)
    rng = np.random.default_rng(1)
    v = FMatrix(F25, rng.integers(0, 5, size=(1, 125, 2)))
    y = MelikyanElement.from_vector(S, v)
    assert y.to_vector() == v
    assert (y - y).is_zero()
