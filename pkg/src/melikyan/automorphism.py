"""Concrete automorphisms of M(2; n).

Matrices act on column vectors in the canonical basis: column j holds the
coordinates of the image of the j-th basis vector.  Flags such as
``bracket_preserving`` are never asserted; they are computed by exhaustive
checks over all pairs of basis vectors when first requested.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .abelian import AbelianGroup, Character, GroupElement
from .divided_power import ShapeDescriptor, _mono_coeff
from .finite_field import (
    CharacteristicError,
    FieldDescriptor,
    FieldElement,
    FieldTooSmall,
    extend_degree,
    make_field,
    root_of_unity,
)
from .grading import Grading, MonomialGrading, Verdict
from .linalg import FMatrix, matmul_coords
from .melikyan import (
    BLOCKS,
    MelikyanElement,
    canonical_basis,
    deg_canonical,
    deg_standard,
    deg_zz,
    pairwise_products,
    structure_table,
    w_positions,
)

__all__ = [
    "Endomorphism",
    "TorusParameter",
    "TorusVerdict",
    "NilpotencyError",
    "product_table",
    "lambda_",
    "torus_points",
    "kernel_of_lambda",
    "beta",
    "theta",
    "upsilon",
    "sigma_w",
    "sigma_m",
    "solve_sigma_constants",
    "pi_restrict",
    "eta",
    "eigenspace_grading",
    "exp_ad",
    "in_torus",
    "normalizes_torus",
    "diagonal_automorphisms",
    "cube_root",
]


class NilpotencyError(ValueError):
    """exp(ad y) requested for y with (ad y)^3 != 0."""


# ---------------------------------------------------------------------------
# product tables for M, W and O
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProductTable:
    """Sparse bilinear product e_I * e_J = sum V e_M over GF(5) on a dim-d space."""

    name: str
    dim: int
    I: np.ndarray
    J: np.ndarray
    M: np.ndarray
    V: np.ndarray

    @cached_property
    def csr(self) -> sp.csr_matrix:
        d = self.dim
        return sp.csr_matrix((self.V, (self.I * d + self.J, self.M)), shape=(d * d, d), dtype=np.int64)


@lru_cache(maxsize=None)
def product_table(shape: ShapeDescriptor, algebra: str = "M") -> ProductTable:
    """Structure constants of M(2;n), of W(2;n) (the W block of M), or of O(2;n)."""
    if algebra == "M":
        t = structure_table(shape)
        return ProductTable("M", t.dim, t.I, t.J, t.M, t.V)
    N = shape.dim
    if algebra == "W":
        t = structure_table(shape)
        lo, hi = N, 3 * N
        mask = (t.I >= lo) & (t.I < hi) & (t.J >= lo) & (t.J < hi)
        if ((t.M[mask] < lo) | (t.M[mask] >= hi)).any():
            raise AssertionError("W block is not closed under the bracket")
        return ProductTable("W", 2 * N, t.I[mask] - lo, t.J[mask] - lo, t.M[mask] - lo, t.V[mask])
    if algebra == "O":
        I, J, M, V = [], [], [], []
        idx = shape.index_of
        for i, a in enumerate(shape.basis):
            for j, b in enumerate(shape.basis):
                c = _mono_coeff(a, b, shape.tau, shape.p)
                if c:
                    I.append(i)
                    J.append(j)
                    M.append(idx[tuple(x + y for x, y in zip(a, b))])
                    V.append(c)
        arr = lambda v: np.array(v, dtype=np.int64)  # noqa: E731
        return ProductTable("O", N, arr(I), arr(J), arr(M), arr(V))
    raise ValueError(f"unknown algebra {algebra!r}; expected 'M', 'W' or 'O'")


def _monomial_pattern(A: FMatrix) -> tuple[np.ndarray, np.ndarray] | None:
    """(pi, c) with column j = c_j e_{pi(j)}, or None if A is not monomial."""
    mask = A.nonzero_mask()
    if not (mask.sum(axis=0) == 1).all() or not (mask.sum(axis=1) == 1).all():
        return None
    pi = mask.argmax(axis=0)
    c = A.data[pi, np.arange(A.shape[1])]
    return pi, c


def _check_monomial(table: ProductTable, F: FieldDescriptor, pi: np.ndarray, c: np.ndarray) -> Verdict:
    d, p = table.dim, F.p
    I, J, M, V = table.I, table.J, table.M, table.V
    key1 = (I * d + J) * d + pi[M]
    val1 = (V[:, None] * c[M]) % p
    inv = np.empty_like(pi)
    inv[pi] = np.arange(d)
    i2, j2 = inv[I], inv[J]
    key2 = (i2 * d + j2) * d + M
    val2 = (V[:, None] * F.mul_arrays(c[i2], c[j2])) % p
    o1, o2 = np.argsort(key1, kind="stable"), np.argsort(key2, kind="stable")
    k1, k2, v1, v2 = key1[o1], key2[o2], val1[o1], val2[o2]
    if k1.shape == k2.shape and (k1 == k2).all() and (v1 == v2).all():
        return Verdict(True)
    if k1.shape == k2.shape:
        t = int(np.flatnonzero((k1 != k2) | (v1 != v2).any(axis=1))[0])
        key = int(min(k1[t], k2[t]))
    else:
        key = int(np.setxor1d(k1, k2)[0]) if np.setxor1d(k1, k2).size else int(k1[0])
    pair, _ = divmod(key, d)
    return Verdict(False, {"i": pair // d, "j": pair % d})


def _check_dense(table: ProductTable, A: FMatrix, batch: int = 32) -> Verdict:
    F = A.field
    d, p, k = table.dim, F.p, F.k
    images = A.T  # rows are images of basis vectors
    C = table.csr
    for start in range(0, d, batch):
        stop = min(d, start + batch)
        rows = C[start * d: stop * d]  # products [e_i, e_j] for i in batch
        lhs = np.stack([(rows @ A.data[:, :, r].T) % p for r in range(k)], axis=-1)
        lhs = lhs.reshape(stop - start, d, d, k)
        rhs = pairwise_products(C, d, images.rows(np.arange(start, stop)), images)
        bad = np.argwhere((lhs != rhs).any(axis=(2, 3)))
        if bad.size:
            i, j = bad[0]
            return Verdict(False, {"i": start + int(i), "j": int(j)})
    return Verdict(True)


def preserves_product(table: ProductTable, A: FMatrix) -> Verdict:
    """Exhaustive check of A(e_i e_j) = A(e_i) A(e_j) on all basis pairs."""
    if A.shape != (table.dim, table.dim):
        raise ValueError(f"matrix of shape {A.shape} does not act on a {table.dim}-dimensional algebra")
    pat = _monomial_pattern(A)
    if pat is not None:
        return _check_monomial(table, A.field, *pat)
    return _check_dense(table, A)


# ---------------------------------------------------------------------------
# Endomorphism
# ---------------------------------------------------------------------------

class Endomorphism:
    """A linear map of M(2; n) (or of W(2; n) / O(2; n)) with lazily verified flags."""

    def __init__(self, shape: ShapeDescriptor, matrix: FMatrix, algebra: str = "M", label: str = ""):
        self.shape = shape
        self.algebra = algebra
        self.table = product_table(shape, algebra)
        if matrix.shape != (self.table.dim, self.table.dim):
            raise ValueError(f"expected a {self.table.dim}x{self.table.dim} matrix, got {matrix.shape}")
        self.matrix = matrix
        self.label = label

    @property
    def field(self) -> FieldDescriptor:
        return self.matrix.field

    @property
    def dim(self) -> int:
        return self.table.dim

    @cached_property
    def invertible(self) -> bool:
        return self.matrix.is_invertible()

    @cached_property
    def bracket_check(self) -> Verdict:
        return preserves_product(self.table, self.matrix)

    @property
    def bracket_preserving(self) -> bool:
        return self.bracket_check.ok

    @cached_property
    def w_preserving(self) -> bool:
        if self.algebra != "M":
            return False
        w = w_positions(self.shape)
        other = np.setdiff1d(np.arange(self.dim), w)
        return not self.matrix.nonzero_mask()[np.ix_(other, w)].any()

    @property
    def is_automorphism(self) -> bool:
        return self.invertible and self.bracket_preserving

    def flags(self) -> dict[str, bool]:
        out = {"invertible": self.invertible, "bracket_preserving": self.bracket_preserving}
        if self.algebra == "M":
            out["w_preserving"] = self.w_preserving
        return out

    def _same(self, other: "Endomorphism"):
        if other.shape != self.shape or other.algebra != self.algebra or other.field != self.field:
            raise ValueError("endomorphisms of different algebras or fields")

    def __matmul__(self, other: "Endomorphism") -> "Endomorphism":
        self._same(other)
        return Endomorphism(self.shape, self.matrix @ other.matrix, self.algebra)

    def inverse(self) -> "Endomorphism":
        return Endomorphism(self.shape, self.matrix.inverse(), self.algebra)

    def power(self, e: int) -> "Endomorphism":
        M = self.matrix.power(e) if e >= 0 else self.matrix.inverse().power(-e)
        return Endomorphism(self.shape, M, self.algebra)

    def __eq__(self, other):
        if not isinstance(other, Endomorphism):
            return NotImplemented
        return self.shape == other.shape and self.algebra == other.algebra and self.matrix == other.matrix

    __hash__ = None

    def is_identity(self) -> bool:
        return self.matrix == FMatrix.identity(self.field, self.dim)

    def apply(self, vectors: FMatrix) -> FMatrix:
        """Images of row vectors."""
        return vectors @ self.matrix.T

    def __call__(self, y: MelikyanElement) -> MelikyanElement:
        return MelikyanElement.from_vector(self.shape, self.apply(y.to_vector()))

    def embed(self, emb) -> "Endomorphism":
        return Endomorphism(self.shape, self.matrix.embed(emb), self.algebra, self.label)

    @classmethod
    def identity(cls, shape, field, algebra="M") -> "Endomorphism":
        return cls(shape, FMatrix.identity(field, product_table(shape, algebra).dim), algebra, "id")

    def __repr__(self):
        name = self.label or "Endomorphism"
        return f"{name}<{self.algebra}{self.shape.n} over GF({self.field.order})>"


# ---------------------------------------------------------------------------
# discrete logarithms and cube roots
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _log_tables(F: FieldDescriptor) -> tuple[np.ndarray, np.ndarray]:
    """(exp, log): exp[e] = coords of g^e, log[index(x)] = e (log[0] = -1)."""
    q = F.order
    if q > 1 << 16:
        raise ValueError("log tables are only built for small fields")
    g = F.primitive_element
    exp = np.zeros((q - 1, F.k), dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    x = F.one
    for e in range(q - 1):
        exp[e] = x.coords
        log[x.index()] = e
        x = x * g
    return exp, log


def _power_coords(F: FieldDescriptor, t: FieldElement, exps: np.ndarray) -> np.ndarray:
    """Coordinates of t**e for every integer e in exps."""
    if F.order <= 1 << 16:
        exp, log = _log_tables(F)
        lt = int(log[t.index()])
        return exp[(lt * exps) % (F.order - 1)]
    return np.array([(t ** int(e)).coords for e in exps], dtype=np.int64)


def cube_root(s: FieldElement) -> FieldElement | None:
    """Some t with t^3 = s, or None when s is not a cube in its field."""
    F = s.field
    if s.is_zero():
        return s
    n = F.order - 1
    if n % 3:
        return s ** pow(3, -1, n)
    if not (s ** (n // 3)) == F.one:
        return None
    e, m = 0, n
    while m % 3 == 0:
        m //= 3
        e += 1
    u = pow(3, -1, m) if m > 1 else 0
    x = s**u
    r = s / x**3  # lies in the Sylow 3-subgroup
    h = F.primitive_element**m
    y = F.one
    for _ in range(3**e):
        if y**3 == r:
            return x * y
        y = y * h
    raise AssertionError("cube root search failed")


# ---------------------------------------------------------------------------
# the torus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusParameter:
    t1: FieldElement
    t2: FieldElement

    def __post_init__(self):
        if self.t1.field != self.t2.field:
            raise ValueError("torus parameters from different fields")
        if self.t1.is_zero() or self.t2.is_zero():
            raise ValueError("torus parameters must be nonzero")

    @property
    def field(self) -> FieldDescriptor:
        return self.t1.field

    @property
    def alpha(self) -> FieldElement:
        return self.t1 * self.t2

    def __mul__(self, other: "TorusParameter") -> "TorusParameter":
        return TorusParameter(self.t1 * other.t1, self.t2 * other.t2)

    def swapped(self) -> "TorusParameter":
        return TorusParameter(self.t2, self.t1)

    def power(self, u: int, v: int) -> FieldElement:
        return self.t1**u * self.t2**v

    def __repr__(self):
        return f"({self.t1!r}, {self.t2!r})"


@lru_cache(maxsize=None)
def _zz_exponents(shape: ShapeDescriptor) -> np.ndarray:
    return np.array([deg_zz(b) for b in canonical_basis(shape)], dtype=np.int64)


def lambda_diagonal(t: TorusParameter, shape: ShapeDescriptor) -> np.ndarray:
    """Coordinates (dim, k) of the diagonal of lambda(t)."""
    F = t.field
    ex = _zz_exponents(shape)
    return F.mul_arrays(_power_coords(F, t.t1, ex[:, 0]), _power_coords(F, t.t2, ex[:, 1]))


def lambda_(t: TorusParameter, shape: ShapeDescriptor) -> Endomorphism:
    """The diagonal map y -> t^{deg_zz(y)} y."""
    F = t.field
    diag = lambda_diagonal(t, shape)
    d = diag.shape[0]
    data = np.zeros((d, d, F.k), dtype=np.int64)
    data[np.arange(d), np.arange(d)] = diag
    return Endomorphism(shape, FMatrix(F, data), "M", f"lambda{t!r}")


def torus_points(F: FieldDescriptor) -> list[TorusParameter]:
    """All of (F^x)^2 in index order."""
    nz = list(F.nonzero_elements())
    return [TorusParameter(a, b) for a in nz for b in nz]


def kernel_of_lambda(F: FieldDescriptor) -> list[TorusParameter]:
    """{(t, 1/t) : t^3 = 1}; only the trivial element when 3 does not divide |F^x|."""
    if (F.order - 1) % 3:
        warnings.warn(f"GF({F.order}) has no nontrivial cube roots of unity; kernel is incomplete", stacklevel=2)
        return [TorusParameter(F.one, F.one)]
    roots = [x for x in F.nonzero_elements() if x**3 == F.one]
    return [TorusParameter(r, r.inverse()) for r in roots]


def beta(F: FieldDescriptor) -> FieldElement:
    """The fixed primitive cube root of unity."""
    return root_of_unity(F, 3)


def theta(shape: ShapeDescriptor, F: FieldDescriptor) -> Endomorphism:
    """lambda(beta^2, beta^2)."""
    b2 = beta(F) ** 2
    out = lambda_(TorusParameter(b2, b2), shape)
    out.label = "Theta"
    return out


# ---------------------------------------------------------------------------
# swap maps
# ---------------------------------------------------------------------------

def _require_square(shape: ShapeDescriptor):
    if shape.m != 2 or shape.n[0] != shape.n[1]:
        raise ValueError(f"the swap maps need n1 = n2; got n = {shape.n}")


def _swap_perm(shape: ShapeDescriptor) -> np.ndarray:
    idx = shape.index_of
    return np.array([idx[(a[1], a[0])] for a in shape.basis], dtype=np.int64)


def _perm_matrix(F: FieldDescriptor, target: np.ndarray, coeff: np.ndarray) -> FMatrix:
    d = len(target)
    data = np.zeros((d, d, F.k), dtype=np.int64)
    data[target, np.arange(d)] = coeff
    return FMatrix(F, data)


def upsilon(shape: ShapeDescriptor, F: FieldDescriptor | None = None) -> Endomorphism:
    """x^(a1, a2) -> x^(a2, a1) on O(2; n)."""
    _require_square(shape)
    F = F or make_field(5, 1)
    sw = _swap_perm(shape)
    one = np.zeros((len(sw), F.k), dtype=np.int64)
    one[:, 0] = 1
    return Endomorphism(shape, _perm_matrix(F, sw, one), "O", "upsilon")


def sigma_w(shape: ShapeDescriptor, F: FieldDescriptor | None = None) -> Endomorphism:
    """sigma = upsilon-conjugation on W(2; n): x^(a1,a2) d_1 -> x^(a2,a1) d_2 and symmetrically."""
    _require_square(shape)
    F = F or make_field(5, 1)
    N = shape.dim
    sw = _swap_perm(shape)
    target = np.concatenate([sw + N, sw])
    one = np.zeros((2 * N, F.k), dtype=np.int64)
    one[:, 0] = 1
    return Endomorphism(shape, _perm_matrix(F, target, one), "W", "sigma")


def _sigma_m_matrix(shape: ShapeDescriptor, F: FieldDescriptor, c_o: int, c_t: int) -> FMatrix:
    N = shape.dim
    sw = _swap_perm(shape)
    # block order O, W1, W2, T1, T2
    target = np.concatenate([sw, sw + 2 * N, sw + N, sw + 4 * N, sw + 3 * N])
    coeff = np.zeros((5 * N, F.k), dtype=np.int64)
    coeff[:N, 0] = c_o % 5
    coeff[N:3 * N, 0] = 1
    coeff[3 * N:, 0] = c_t % 5
    return _perm_matrix(F, target, coeff)


def solve_sigma_constants(shape: ShapeDescriptor) -> list[tuple[int, int]]:
    """All (c_O, c_T) in GF(5)^x making the swap extension respect [x1, x2] and [d~1, d~2].

    The two brackets give one scalar equation each; they are solved by running
    through the 16 candidate pairs.
    """
    _require_square(shape)
    F = make_field(5, 1)
    table = structure_table(shape)
    N = shape.dim
    idx = shape.index_of
    x1, x2 = idx[(1, 0)], idx[(0, 1)]
    t1, t2 = 3 * N + idx[(0, 0)], 4 * N + idx[(0, 0)]
    sols = []
    for c_o in range(1, 5):
        for c_t in range(1, 5):
            A = _sigma_m_matrix(shape, F, c_o, c_t)
            images = A.T
            ok = True
            for i, j in ((x1, x2), (t1, t2)):
                prod = np.zeros((1, table.dim, 1), dtype=np.int64)
                for m, v in table.bracket_indices(i, j).items():
                    prod[0, m, 0] = v
                lhs = FMatrix(F, prod) @ A.T
                rhs = table.brackets_of_vectors(images.row(i), images.row(j))
                ok &= lhs == rhs
            if ok:
                sols.append((c_o if c_o < 3 else c_o - 5, c_t if c_t < 3 else c_t - 5))
    return sols


def sigma_m(shape: ShapeDescriptor, F: FieldDescriptor | None = None) -> Endomorphism:
    """The swap extension to M(2; n): sigma on W, c_O * upsilon on O, c_T * swap on the tilde copy."""
    F = F or make_field(5, 1)
    sols = solve_sigma_constants(shape)
    for c_o, c_t in sols:
        out = Endomorphism(shape, _sigma_m_matrix(shape, F, c_o, c_t), "M", "sigma_M")
        if out.bracket_preserving:
            out.constants = (c_o, c_t)
            return out
    raise ArithmeticError(f"no constant pair passes the full bracket check (candidates {sols})")


def pi_restrict(psi: Endomorphism) -> Endomorphism:
    """Restriction of a W-preserving automorphism to W(2; n)."""
    if psi.algebra != "M" or not psi.w_preserving:
        raise ValueError("restriction to W needs a W-preserving endomorphism of M")
    w = w_positions(psi.shape)
    return Endomorphism(psi.shape, psi.matrix.submatrix(w, w), "W", f"pi({psi.label})" if psi.label else "")


# ---------------------------------------------------------------------------
# duality: characters act on graded spaces
# ---------------------------------------------------------------------------

def _component_change_of_basis(G: Grading) -> tuple[FMatrix, list[GroupElement]]:
    """P whose rows are the component bases, and the label of every row."""
    P = FMatrix.vstack(G.field, (B for _, B in G.components), G.dim)
    labels = [g for g, B in G.components for _ in range(B.shape[0])]
    return P, labels


def eta(G: Grading, chi: Character) -> Endomorphism:
    """The map acting on the component labelled g by the scalar chi(g)."""
    if chi.group != G.group:
        raise ValueError(f"character of {chi.group} cannot act on a {G.group}-grading")
    if chi.field != G.field:
        raise ValueError("character and grading over different fields")
    if not G.verdict.ok:
        raise ValueError("eta needs a verified grading")
    F = G.field
    if isinstance(G, MonomialGrading):
        diag = np.array([chi(g).coords for g in G.degrees], dtype=np.int64)
        d = G.dim
        data = np.zeros((d, d, F.k), dtype=np.int64)
        data[np.arange(d), np.arange(d)] = diag
        return Endomorphism(G.shape, FMatrix(F, data), "M", "eta")
    P, labels = _component_change_of_basis(G)
    vals = np.array([chi(g).coords for g in labels], dtype=np.int64)
    # rows of P are eigenvectors: (P^T D P^{-T}) acting on columns
    PT = P.T
    scaled = FMatrix(F, F.mul_arrays(PT.data, vals[None, :, :]))
    return Endomorphism(G.shape, scaled @ PT.inverse(), "M", "eta")


def _order_of(A: FMatrix, bound: int) -> int | None:
    """Multiplicative order of A among divisors of bound, if any."""
    I = FMatrix.identity(A.field, A.shape[0])
    for m in sorted(d for d in range(1, bound + 1) if bound % d == 0):
        if A.power(m) == I:
            return m
    return None


def eigenspace_grading(Q: Sequence[Endomorphism], G_hint: AbelianGroup | None = None) -> Grading:
    """Simultaneous eigenspace decomposition of commuting diagonalizable maps.

    With ``G_hint`` the j-th map is read as the action of the j-th generator
    character of ``G_hint`` (value zeta_{m_j} on the j-th generator), so joint
    eigenvalues become elements of ``G_hint``.  Without a hint each map's
    order m_j is computed and labels live in the group with invariant
    factors obtained by normalising prod Z/m_j.
    """
    Q = list(Q)
    if not Q:
        raise ValueError("need at least one endomorphism")
    shape, F = Q[0].shape, Q[0].field
    for A in Q:
        if A.shape != shape or A.field != F or A.algebra != "M":
            raise ValueError("all maps must act on the same M(2; n) over the same field")
    for a in range(len(Q)):
        for b in range(a + 1, len(Q)):
            if not Q[a].matrix @ Q[b].matrix == Q[b].matrix @ Q[a].matrix:
                raise ValueError(f"maps {a} and {b} do not commute")
    q1 = F.order - 1
    if G_hint is not None:
        if not G_hint.is_finite or G_hint.ngens != len(Q):
            raise ValueError("G_hint must be finite with one generator per map")
        orders = list(G_hint.torsion)
        for m in orders:
            if m % F.p == 0:
                raise CharacteristicError(f"order {m} is divisible by the characteristic")
            if q1 % m:
                raise FieldTooSmall(f"GF({F.order}) lacks the {m}-th roots of unity")
        for A, m in zip(Q, orders):
            if not A.matrix.power(m) == FMatrix.identity(F, A.dim):
                raise ValueError(f"a map does not have order dividing {m}")
        group, to_group = G_hint, None
    else:
        orders = []
        for A in Q:
            m = _order_of(A.matrix, q1)
            if m is None:
                raise ValueError("a map is not diagonalizable over the field (order does not divide q-1)")
            orders.append(m)
        group, to_group = AbelianGroup.from_presentation(
            len(Q), [[m * int(i == j) for i in range(len(Q))] for j, m in enumerate(orders)]
        )
    # joint eigenspaces, refined one map at a time
    d = Q[0].dim
    spaces: list[tuple[tuple[int, ...], FMatrix]] = [((), FMatrix.identity(F, d))]
    for A, m in zip(Q, orders):
        zeta = root_of_unity(F, m) if m > 1 else F.one
        new = []
        for exps, B in spaces:
            got = 0
            for e in range(m):
                shifted = A.matrix - FMatrix.identity(F, d).scale(zeta**e)
                X = (shifted @ B.T).nullspace()
                if X.shape[0]:
                    new.append((exps + (e,), X @ B))
                    got += X.shape[0]
            if got != B.shape[0]:
                raise ValueError("a map is not diagonalizable with eigenvalues of the expected order")
        spaces = new
    comps = []
    Zr = AbelianGroup(len(Q))
    for exps, B in spaces:
        label = group.element(exps) if to_group is None else to_group(Zr.element(exps))
        comps.append((label, B.row_space()))
    return Grading(shape, F, group, comps)


# ---------------------------------------------------------------------------
# unipotent twists
# ---------------------------------------------------------------------------

def exp_ad(y: MelikyanElement | FMatrix, shape: ShapeDescriptor | None = None) -> Endomorphism:
    """Id + ad y + (ad y)^2 / 2, for y with (ad y)^3 = 0."""
    if isinstance(y, MelikyanElement):
        shape, vec = y.shape, y.to_vector()
    else:
        if shape is None:
            raise ValueError("a shape is needed for coordinate vectors")
        vec = y
    F = vec.field
    table = structure_table(shape)
    A = table.ad(vec)
    A2 = A @ A
    A3 = A2 @ A
    if not A3.is_zero():
        r, c = np.argwhere(A3.nonzero_mask())[0]
        raise NilpotencyError(
            f"(ad y)^3 != 0 (entry ({int(r)}, {int(c)}), basis vector {canonical_basis(shape)[int(c)]!r}); "
            "the truncated exponential needs (ad y)^3 = 0"
        )
    half = pow(2, -1, F.p)
    M = FMatrix.identity(F, table.dim) + A + A2.scale(half)
    return Endomorphism(shape, M, "M", "exp_ad")


# ---------------------------------------------------------------------------
# torus membership and normalizers
# ---------------------------------------------------------------------------

@dataclass
class TorusVerdict:
    ok: bool
    parameter: TorusParameter | None = None
    embedding: Any = None  # working field -> field of the parameter
    obstruction: dict[str, Any] | None = None

    def __bool__(self):
        return self.ok


@lru_cache(maxsize=None)
def _standard_exponents(shape: ShapeDescriptor) -> np.ndarray:
    return np.array([deg_standard(b) for b in canonical_basis(shape)], dtype=np.int64)


def in_torus(psi: Endomorphism, recover: bool = True) -> TorusVerdict:
    """Decide psi = lambda(t) for some t over an extension of degree <= 3.

    lambda(t) acts on a vector of standard degree (i, j) by s^i alpha^j with
    s = t1^3, alpha = t1 t2, so membership is decided over the working field;
    recovering t itself may need a cube root from a cubic extension.
    """
    if psi.algebra != "M":
        return TorusVerdict(False, obstruction={"reason": "not an endomorphism of M"})
    A, F, shape = psi.matrix, psi.field, psi.shape
    mask = A.nonzero_mask().copy()
    d = psi.dim
    diag_nz = mask[np.arange(d), np.arange(d)].copy()
    mask[np.arange(d), np.arange(d)] = False
    if mask.any():
        r, c = np.argwhere(mask)[0]
        return TorusVerdict(False, obstruction={"reason": "not diagonal", "entry": [int(r), int(c)], "value": repr(A.entry(int(r), int(c)))})
    if not diag_nz.all():
        i = int(np.flatnonzero(~diag_nz)[0])
        return TorusVerdict(False, obstruction={"reason": "singular diagonal", "index": i})
    basis = canonical_basis(shape)
    pos = {b: i for i, b in enumerate(basis)}
    N = shape.dim
    d_partial1 = A.entry(pos[basis[N]], pos[basis[N]])  # d_1 has standard degree (-1, 0)
    d_one = A.entry(0, 0)  # 1 has standard degree (0, -1)
    s, alpha = d_partial1.inverse(), d_one.inverse()
    ex = _standard_exponents(shape)
    expected = F.mul_arrays(_power_coords(F, s, ex[:, 0]), _power_coords(F, alpha, ex[:, 1]))
    actual = A.data[np.arange(d), np.arange(d)]
    bad = np.flatnonzero((expected != actual).any(axis=1))
    if bad.size:
        i = int(bad[0])
        return TorusVerdict(False, obstruction={
            "reason": "diagonal is not a torus character",
            "basis_vector": repr(basis[i]), "standard_degree": [int(v) for v in ex[i]],
            "expected": repr(F.element(tuple(expected[i]))), "actual": repr(A.entry(i, i)),
        })
    if not recover:
        return TorusVerdict(True)
    t1 = cube_root(s)
    emb = None
    if t1 is None:
        big, emb = extend_degree(F, 3)
        t1 = cube_root(emb(s))
        alpha = emb(alpha)
    return TorusVerdict(True, TorusParameter(t1, alpha / t1), emb)


@dataclass
class NormalizerVerdict:
    ok: bool
    induced: str | None = None  # "identity", "swap" or "other"
    pairs: list[tuple[TorusParameter, Any]] | None = None
    obstruction: dict[str, Any] | None = None

    def __bool__(self):
        return self.ok


def normalizes_torus(psi: Endomorphism, sample: Iterable[TorusParameter]) -> NormalizerVerdict:
    """Check psi lambda(t) psi^{-1} lies in the torus for every sampled t."""
    inv = psi.matrix.inverse()
    kinds = set()
    pairs = []
    for t in sample:
        lam = lambda_(t, psi.shape)
        conj = Endomorphism(psi.shape, psi.matrix @ lam.matrix @ inv, "M")
        v = in_torus(conj, recover=False)
        if not v.ok:
            return NormalizerVerdict(False, obstruction={"t": repr(t), **(v.obstruction or {})})
        diag = conj.matrix.data[np.arange(conj.dim), np.arange(conj.dim)]
        if (diag == lambda_diagonal(t, psi.shape)).all():
            kinds.add("identity")
        elif (diag == lambda_diagonal(t.swapped(), psi.shape)).all():
            kinds.add("swap")
        else:
            kinds.add("other")
        pairs.append((t, conj))
    if not kinds:
        induced = None
    elif kinds == {"identity"}:
        induced = "identity"
    elif kinds <= {"identity", "swap"} and "swap" in kinds:
        induced = "swap"  # points fixed by the swap also appear as identity
    else:
        induced = "other"
    return NormalizerVerdict(True, induced, pairs)


# ---------------------------------------------------------------------------
# diagonal automorphisms fixing W
# ---------------------------------------------------------------------------

def diagonal_automorphisms(shape: ShapeDescriptor, order: int = 3, fixed: Sequence[int] | None = None) -> list[np.ndarray]:
    """All exponent vectors e (mod order) with diag(zeta^e) bracket-preserving.

    Positions in ``fixed`` (default: the W block) are pinned to exponent 0.
    Every nonzero structure constant [e_i, e_j] -> e_m forces
    e_m = e_i + e_j; the search backtracks over free positions and
    propagates these constraints to a fixed point.
    """
    table = structure_table(shape)
    d = table.dim
    I, J, M = table.I, table.J, table.M
    fixed = w_positions(shape) if fixed is None else np.asarray(fixed)
    by_var: list[list[int]] = [[] for _ in range(d)]
    for t in range(len(I)):
        for v in {int(I[t]), int(J[t]), int(M[t])}:
            by_var[v].append(t)

    def propagate(e: np.ndarray, todo: list[int]) -> bool:
        while todo:
            v = todo.pop()
            for t in by_var[v]:
                i, j, m = int(I[t]), int(J[t]), int(M[t])
                ki, kj, km = e[i] >= 0, e[j] >= 0, e[m] >= 0
                if ki and kj:
                    val = (e[i] + e[j]) % order
                    if km:
                        if e[m] != val:
                            return False
                    else:
                        e[m] = val
                        todo.append(m)
                elif ki and km and i != j:
                    e[j] = (e[m] - e[i]) % order
                    todo.append(j)
                elif kj and km and i != j:
                    e[i] = (e[m] - e[j]) % order
                    todo.append(i)
        return True

    start = np.full(d, -1, dtype=np.int64)
    start[fixed] = 0
    if not propagate(start, list(int(v) for v in fixed)):
        return []
    out = []
    stack = [start]
    while stack:
        e = stack.pop()
        free = np.flatnonzero(e < 0)
        if not free.size:
            out.append(e)
            continue
        v = int(free[0])
        for val in range(order - 1, -1, -1):
            e2 = e.copy()
            e2[v] = val
            if propagate(e2, [v]):
                stack.append(e2)
    out.sort(key=lambda e: tuple(e))
    return out


def diagonal_from_exponents(shape: ShapeDescriptor, F: FieldDescriptor, exps: np.ndarray, order: int = 3) -> Endomorphism:
    zeta = root_of_unity(F, order)
    diag = _power_coords(F, zeta, np.asarray(exps))
    d = len(exps)
    data = np.zeros((d, d, F.k), dtype=np.int64)
    data[np.arange(d), np.arange(d)] = diag
    return Endomorphism(shape, FMatrix(F, data), "M")
