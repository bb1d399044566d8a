import random

import numpy as np
import pytest

from melikyan.abelian import Z2, cyclic, generator_characters, pullback_character, character_group
from melikyan.automorphism import (
    Endomorphism,
    NilpotencyError,
    TorusParameter,
    beta,
    cube_root,
    diagonal_automorphisms,
    eigenspace_grading,
    eta,
    exp_ad,
    in_torus,
    kernel_of_lambda,
    lambda_,
    normalizes_torus,
    pi_restrict,
    preserves_product,
    product_table,
    sigma_m,
    sigma_w,
    solve_sigma_constants,
    theta,
    torus_points,
    upsilon,
)
from melikyan.finite_field import extend_degree, make_field
from melikyan.grading import coarsen, same_grading, standard_grading, zz_grading
from melikyan.linalg import FMatrix
from melikyan.melikyan import BasisIndex, basis_element, canonical_basis, m_bracket, melikyan_shape
from melikyan.abelian import GroupHom

F5 = make_field(5, 1)
F25 = make_field(5, 2)


@pytest.fixture(scope="module")
def S():
    return melikyan_shape(1, 1)


def e(S, block, a, c=None, F=F25):
    return basis_element(S, F, BasisIndex(block, a), c if c is not None else F.one)


def test_lambda_examples(S):
    t = torus_points(F25)[100]
    lam = lambda_(t, S)
    assert lam(e(S, "W1", (0, 0))) == e(S, "W1", (0, 0), (t.t1 ** 3).inverse())
    b2 = beta(F25) ** 2
    lb = lambda_(TorusParameter(b2, b2), S)
    assert lb(e(S, "O", (0, 0))) == e(S, "O", (0, 0), b2)


def test_theta_examples(S):
    Th = theta(S, F25)
    b = beta(F25)
    assert Th(e(S, "T1", (0, 0))) == e(S, "T1", (0, 0), b)
    assert Th.power(3).is_identity() and not Th.is_identity()
    assert Th.is_automorphism


def test_lambda_is_homomorphism(S):
    pts = torus_points(F25)
    rng = random.Random(0)
    for _ in range(5):
        s, t = rng.choice(pts), rng.choice(pts)
        assert lambda_(s * t, S) == lambda_(s, S) @ lambda_(t, S)


def test_kernel(S):
    ker = kernel_of_lambda(F25)
    assert len(ker) == 3
    assert all(lambda_(t, S).is_identity() for t in ker)
    brute = [t for t in torus_points(F25) if lambda_(t, S).is_identity()]
    assert {(t.t1, t.t2) for t in brute} == {(t.t1, t.t2) for t in ker}
    with pytest.warns(UserWarning):
        assert len(kernel_of_lambda(F5)) == 1


def test_cube_root():
    for x in F25.nonzero_elements():
        r = cube_root(x ** 3)
        assert r is not None and r ** 3 == x ** 3


def test_swaps(S):
    ups = upsilon(S)
    N = S.dim
    idx = S.index_of
    col = ups.matrix.data[:, idx[(2, 1)], 0]
    assert np.flatnonzero(col).tolist() == [idx[(1, 2)]]
    sw = sigma_w(S)
    assert sw.power(2).is_identity()
    assert np.flatnonzero(sw.matrix.data[:, idx[(0, 0)], 0]).tolist() == [N + idx[(0, 0)]]
    assert sw.bracket_preserving


def test_sigma_m(S):
    assert solve_sigma_constants(S) == [(-1, -1)]
    sm = sigma_m(S, F25)
    assert sm(e(S, "O", (0, 0))) == e(S, "O", (0, 0), -F25.one)
    assert sm.is_automorphism and sm.w_preserving
    assert pi_restrict(sm) == sigma_w(S, F25)
    with pytest.raises(ValueError):
        sigma_m(melikyan_shape(1, 2))


def test_sigma_normalizes_torus(S):
    sm = sigma_m(S, F25)
    sample = torus_points(F25)[::37]
    v = normalizes_torus(sm, sample)
    assert v.ok and v.induced == "swap"
    assert not in_torus(sm)
    assert normalizes_torus(theta(S, F25), sample).induced == "identity"


def test_centralizer_sample(S):
    """lambda(t) commutes with Theta for every sampled t."""
    Th = theta(S, F25)
    for t in torus_points(F25)[::53]:
        L = lambda_(t, S)
        assert L @ Th == Th @ L


def test_diagonal_order3_automorphisms(S):
    sols = diagonal_automorphisms(S)
    assert len(sols) == 3
    Th = theta(S, F25)
    powers = [Th.power(l) for l in range(3)]
    from melikyan.automorphism import diagonal_from_exponents

    maps = [diagonal_from_exponents(S, F25, x) for x in sols]
    assert all(any(m == p for p in powers) for m in maps)


def test_in_torus_recovers_parameter(S):
    t = torus_points(F25)[201]
    v = in_torus(lambda_(t, S))
    assert v.ok
    assert v.embedding is None
    assert lambda_(v.parameter, S) == lambda_(t, S)
    v6 = in_torus(lambda_(TorusParameter(beta(F25), F25.one), S))
    assert v6.ok


def test_in_torus_needs_cubic_extension(S):
    # s = t1^3 with no cube root in GF(25): pick a non-cube
    noncube = next(x for x in F25.nonzero_elements() if cube_root(x) is None)
    alpha = F25.one
    # lambda(t) with t1 in GF(5^6) is still a torus element
    big, emb = extend_degree(F25, 3)
    t1 = cube_root(emb(noncube))
    lam = lambda_(TorusParameter(t1, emb(alpha) / t1), S)
    assert lam.is_automorphism
    v = in_torus(lam)
    assert v.ok and v.parameter.t1 ** 3 == emb(noncube)


def test_in_torus_rejects(S):
    v = in_torus(exp_ad(e(S, "T1", (4, 4))))
    assert not v.ok and v.obstruction["reason"] == "not diagonal"


def test_eta_example(S):
    phi = GroupHom.from_matrix(Z2, cyclic(3), [[1], [0]])
    G = standard_grading(phi, S, F25)
    (chi,) = generator_characters(cyclic(3), F25)
    E = eta(G, chi)
    assert E.is_automorphism
    # the action on the component of label 1 is beta
    b = beta(F25)
    assert E(e(S, "W1", (1, 0))) == e(S, "W1", (1, 0))  # standard degree (0,0)
    assert E(e(S, "W1", (0, 0))) == e(S, "W1", (0, 0), b * b)  # standard degree (-1,0)


def test_eta_of_pullback_is_in_torus(S):
    std = standard_grading(GroupHom.identity(Z2), S, F25)
    phi = GroupHom.from_matrix(Z2, cyclic(6), [[1], [4]])
    for chi in character_group(cyclic(6), F25)[:4]:
        E = eta(std, pullback_character(chi, phi))
        assert in_torus(E).ok
        assert E == eta(coarsen(std, phi), chi)


def test_theta_eigenspaces(S):
    """The Z/3 grading given by Theta is the canonical degree mod 3, up to relabelling."""
    R = eigenspace_grading([theta(S, F25)])
    can = standard_grading(GroupHom.from_matrix(Z2, cyclic(3), [[0], [2]]), S, F25)
    from melikyan.grading import find_relabeling

    rel = find_relabeling(R, can)
    assert rel is not None
    assert len(set(rel.values())) == 3


def test_exp_ad(S):
    y = e(S, "T2", (4, 4)) + e(S, "T1", (4, 3))
    psi = exp_ad(y)
    assert psi.is_automorphism
    with pytest.raises(NilpotencyError):
        exp_ad(e(S, "W1", (0, 0)))


def test_dense_check_catches_perturbation(S):
    psi = exp_ad(e(S, "T2", (4, 4)))
    data = psi.matrix.data.copy()
    data[3, 7, 0] = (data[3, 7, 0] + 1) % 5
    bad = Endomorphism(S, FMatrix(F25, data))
    v = bad.bracket_check
    assert not v.ok and v.witness


def test_spot_audit_against_direct_bracket(S):
    """psi[a,b] = [psi a, psi b] with the bracket computed directly."""
    psi = exp_ad(e(S, "T2", (4, 4), F25.element(2))) @ lambda_(torus_points(F25)[77], S)
    basis = canonical_basis(S)
    rng = random.Random(2)
    for _ in range(40):
        a, b = rng.choice(basis), rng.choice(basis)
        x, y = basis_element(S, F25, a), basis_element(S, F25, b)
        assert psi(m_bracket(x, y)) == m_bracket(psi(x), psi(y))


def test_product_tables(S):
    assert product_table(S, "O").dim == 25
    assert product_table(S, "W").dim == 50
    assert preserves_product(product_table(S, "O"), upsilon(S).matrix).ok
