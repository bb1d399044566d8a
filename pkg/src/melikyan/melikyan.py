"""The Melikyan algebra M(2; n) = O(2; n) + W(2; n) + W~(2; n) in characteristic 5.

Canonical basis order (the contract for every matrix in this package):
the O block, then ``x^(a) d_1``, ``x^(a) d_2``, ``x^(a) d~_1``,
``x^(a) d~_2``, each block in lexicographic order of ``a``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple

import numpy as np
import scipy.sparse as sp

from .divided_power import DividedPowerPoly, MultiIndex, ShapeDescriptor, deg_O, multiply
from .finite_field import FieldDescriptor, FieldElement, make_field
from .linalg import FMatrix
from .witt import TildeField, VectorField, apply, divergence, tilde, untilde, witt_bracket

log = logging.getLogger(__name__)

P = 5
BLOCKS = ("O", "W1", "W2", "T1", "T2")

__all__ = [
    "BLOCKS",
    "MelikyanElement",
    "BasisIndex",
    "melikyan_shape",
    "canonical_basis",
    "basis_element",
    "m_bracket",
    "deg_zz",
    "deg_standard",
    "deg_canonical",
    "filtration_component",
    "StructureTable",
    "structure_table",
    "pairwise_products",
    "block_slice",
    "w_positions",
    "antisymmetry_failures",
    "jacobiator",
    "jacobi_failures",
    "all_triples",
    "grading_failures_zz",
    "ideal_dimension",
]


def melikyan_shape(n1: int, n2: int) -> ShapeDescriptor:
    return ShapeDescriptor((n1, n2), P)


class BasisIndex(NamedTuple):
    block: str
    a: MultiIndex

    def __repr__(self):
        if self.block == "O":
            return f"x^{self.a}"
        sym = "d" if self.block[0] == "W" else "d~"
        return f"x^{self.a}{sym}{self.block[1]}"


def _check_shape(shape: ShapeDescriptor):
    if shape.p != P:
        raise ValueError(f"Melikyan algebras require p = 5, got p = {shape.p}")
    if shape.m != 2:
        raise ValueError("Melikyan algebras are defined for m = 2 only")


@lru_cache(maxsize=None)
def canonical_basis(shape: ShapeDescriptor) -> tuple[BasisIndex, ...]:
    _check_shape(shape)
    return tuple(BasisIndex(b, a) for b in BLOCKS for a in shape.basis)


@lru_cache(maxsize=None)
def _position(shape: ShapeDescriptor) -> dict[BasisIndex, int]:
    return {b: i for i, b in enumerate(canonical_basis(shape))}


def block_slice(shape: ShapeDescriptor, block: str) -> slice:
    N = shape.dim
    k = BLOCKS.index(block)
    return slice(k * N, (k + 1) * N)


def w_positions(shape: ShapeDescriptor) -> np.ndarray:
    N = shape.dim
    return np.arange(N, 3 * N)


class MelikyanElement:
    """An element f + D + E~ with f in O, D in W, E~ in W~."""

    __slots__ = ("shape", "field", "o_part", "w_part", "wt_part")

    def __init__(self, shape, field, o_part=None, w_part=None, wt_part=None):
        _check_shape(shape)
        if field.p != P:
            raise ValueError("coefficients must lie in a field of characteristic 5")
        self.shape, self.field = shape, field
        self.o_part = o_part if o_part is not None else DividedPowerPoly.zero(shape, field)
        self.w_part = w_part if w_part is not None else VectorField.zero(shape, field)
        self.wt_part = wt_part if wt_part is not None else TildeField.zero(shape, field)
        if not isinstance(self.w_part, VectorField) or not isinstance(self.wt_part, TildeField):
            raise TypeError("w_part must be a VectorField and wt_part a TildeField")
        for part in (self.o_part, self.w_part, self.wt_part):
            if part.shape != shape or part.field != field:
                raise ValueError("all parts must share the shape and field")

    @classmethod
    def zero(cls, shape, field):
        return cls(shape, field)

    def is_zero(self) -> bool:
        return self.o_part.is_zero() and self.w_part.is_zero() and self.wt_part.is_zero()

    def __eq__(self, other):
        if not isinstance(other, MelikyanElement):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.o_part == other.o_part
            and self.w_part == other.w_part
            and self.wt_part == other.wt_part
        )

    __hash__ = None

    def __add__(self, other):
        return MelikyanElement(
            self.shape, self.field,
            self.o_part + other.o_part, self.w_part + other.w_part, self.wt_part + other.wt_part,
        )

    def __neg__(self):
        return MelikyanElement(self.shape, self.field, -self.o_part, -self.w_part, -self.wt_part)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return MelikyanElement(
            self.shape, self.field, self.o_part.scale(c), self.w_part.scale(c), self.wt_part.scale(c)
        )

    def terms(self) -> Iterable[tuple[BasisIndex, FieldElement]]:
        for a, c in self.o_part.terms.items():
            yield BasisIndex("O", a), c
        for i, comp in enumerate(self.w_part.components, start=1):
            for a, c in comp.terms.items():
                yield BasisIndex(f"W{i}", a), c
        for i, comp in enumerate(self.wt_part.components, start=1):
            for a, c in comp.terms.items():
                yield BasisIndex(f"T{i}", a), c

    def to_vector(self) -> FMatrix:
        """Coordinates in the canonical basis, as a 1 x dim matrix."""
        pos = _position(self.shape)
        dim = 5 * self.shape.dim
        data = np.zeros((1, dim, self.field.k), dtype=np.int64)
        for b, c in self.terms():
            data[0, pos[b]] = c.coords
        return FMatrix(self.field, data)

    @classmethod
    def from_vector(cls, shape, vec: FMatrix) -> "MelikyanElement":
        F = vec.field
        basis = canonical_basis(shape)
        data = vec.data.reshape(-1, F.k)
        if data.shape[0] != len(basis):
            raise ValueError("vector length differs from dim M")
        out = cls.zero(shape, F)
        for i in np.flatnonzero(data.any(axis=1)):
            out = out + basis_element(shape, F, basis[i], FieldElement(F, tuple(int(v) for v in data[i])))
        return out

    def __repr__(self):
        parts = [f"{c!r}*{b!r}" for b, c in self.terms()]
        return " + ".join(parts) if parts else "0"


def basis_element(shape, field, b: BasisIndex, coeff=1) -> MelikyanElement:
    block, a = b
    if block == "O":
        return MelikyanElement(shape, field, o_part=DividedPowerPoly.monomial(shape, field, a, coeff))
    i = int(block[1])
    if block[0] == "W":
        return MelikyanElement(shape, field, w_part=VectorField.basis_element(shape, field, a, i, coeff))
    if block[0] == "T":
        return MelikyanElement(shape, field, wt_part=TildeField.basis_element(shape, field, a, i, coeff))
    raise ValueError(f"unknown block {block!r}")


# ---------------------------------------------------------------------------
# the five bracket rules
# ---------------------------------------------------------------------------

def _d_tilde(D: VectorField, E: TildeField) -> TildeField:
    # [D, E~] = [D, E]~ + 2 div(D) E~
    return tilde(witt_bracket(D, untilde(E))) + E.times(divergence(D)).scale(2)


def _d_f(D: VectorField, f: DividedPowerPoly) -> DividedPowerPoly:
    # [D, f] = D(f) - 2 div(D) f
    return apply(D, f) - multiply(divergence(D), f).scale(2)


def _f_tilde(f: DividedPowerPoly, E: TildeField) -> VectorField:
    # [f, E~] = f E
    return untilde(E).times(f)


def _f_f(f1: DividedPowerPoly, f2: DividedPowerPoly) -> TildeField:
    # [f1, f2] = 2(f1 d1 f2 - f2 d1 f1) d~2 + 2(f2 d2 f1 - f1 d2 f2) d~1
    from .divided_power import partial

    c2 = (multiply(f1, partial(1, f2)) - multiply(f2, partial(1, f1))).scale(2)
    c1 = (multiply(f2, partial(2, f1)) - multiply(f1, partial(2, f2))).scale(2)
    return TildeField(f1.shape, f1.field, (c1, c2))


def _tilde_tilde(E: TildeField, G: TildeField) -> DividedPowerPoly:
    # [f1 d~1 + f2 d~2, g1 d~1 + g2 d~2] = f1 g2 - f2 g1
    f1, f2 = E.components
    g1, g2 = G.components
    return multiply(f1, g2) - multiply(f2, g1)


def m_bracket(y: MelikyanElement, z: MelikyanElement) -> MelikyanElement:
    """Bracket of M(2; n), extended to unlisted argument orders by antisymmetry."""
    if y.shape != z.shape:
        raise ValueError("shape mismatch")
    if y.field != z.field:
        raise ValueError("elements over different fields")
    shape, field = y.shape, y.field
    f, D, E = y.o_part, y.w_part, y.wt_part
    g, D2, E2 = z.o_part, z.w_part, z.wt_part

    o = DividedPowerPoly.zero(shape, field)
    w = VectorField.zero(shape, field)
    t = TildeField.zero(shape, field)

    if D and D2:
        w = w + witt_bracket(D, D2)
    if D and E2:
        t = t + _d_tilde(D, E2)
    if E and D2:
        t = t - _d_tilde(D2, E)
    if D and g:
        o = o + _d_f(D, g)
    if f and D2:
        o = o - _d_f(D2, f)
    if f and E2:
        w = w + _f_tilde(f, E2)
    if E and g:
        w = w - _f_tilde(g, E)
    if f and g:
        t = t + _f_f(f, g)
    if E and E2:
        o = o + _tilde_tilde(E, E2)
    return MelikyanElement(shape, field, o, w, t)


# ---------------------------------------------------------------------------
# degrees and filtration
# ---------------------------------------------------------------------------

def _eps(block: str) -> tuple[int, int]:
    return (1, 0) if block[1] == "1" else (0, 1)


def deg_zz(b: BasisIndex) -> tuple[int, int]:
    """Degree in the Z^2-grading by 3(a - eps_i), 3(a - eps_i) + (1,1), 3a - (1,1)."""
    block, a = b
    if block == "O":
        return 3 * a[0] - 1, 3 * a[1] - 1
    e = _eps(block)
    u, v = 3 * (a[0] - e[0]), 3 * (a[1] - e[1])
    if block[0] == "T":
        return u + 1, v + 1
    return u, v


def deg_standard(b: BasisIndex) -> tuple[int, int]:
    """Degree in the standard Z^2-grading: the preimage of deg_zz under
    (i, j) -> (3i + j, j)."""
    u, v = deg_zz(b)
    assert (u - v) % 3 == 0, f"{b} has deg_zz {(u, v)} outside the image lattice"
    return (u - v) // 3, v


def deg_canonical(b: BasisIndex) -> int:
    block, a = b
    if block == "O":
        return 3 * deg_O(a) - 2
    dw = deg_O(a) - 1
    return 3 * dw if block[0] == "W" else 3 * dw + 2


def filtration_component(i: int, shape: ShapeDescriptor) -> list[BasisIndex]:
    """Basis of the filtration piece spanned by canonical degrees >= i."""
    return [b for b in canonical_basis(shape) if deg_canonical(b) >= i]


# ---------------------------------------------------------------------------
# structure constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StructureTable:
    """Structure constants over GF(5): [e_I, e_J] = sum V e_M over (I, J, M, V)."""

    shape: ShapeDescriptor
    I: np.ndarray
    J: np.ndarray
    M: np.ndarray
    V: np.ndarray

    @property
    def dim(self) -> int:
        return 5 * self.shape.dim

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Rows indexed by I * dim + J, columns by M."""
        d = self.dim
        return sp.csr_matrix((self.V, (self.I * d + self.J, self.M)), shape=(d * d, d), dtype=np.int64)

    @cached_property
    def dense(self) -> np.ndarray:
        d = self.dim
        if d > 200:
            raise MemoryError(f"dense structure tensor of dim {d} is not materialised")
        C = np.zeros((d, d, d), dtype=np.int64)
        C[self.I, self.J, self.M] = self.V
        return C

    def bracket_indices(self, i: int, j: int) -> dict[int, int]:
        row = self.csr.getrow(i * self.dim + j)
        return {int(m): int(v) for m, v in zip(row.indices, row.data)}

    def ad(self, y: FMatrix) -> FMatrix:
        """Matrix of ad y acting on column vectors; y is 1 x dim."""
        F = y.field
        d = self.dim
        coeffs = y.data.reshape(d, F.k)
        out = np.zeros((d, d, F.k), dtype=np.int64)
        # (ad y)[m, j] = sum_i y_i C[i, j, m]
        for r in range(F.k):
            yr = coeffs[:, r]
            if not yr.any():
                continue
            mask = yr[self.I] != 0
            np.add.at(out[..., r], (self.M[mask], self.J[mask]), yr[self.I[mask]] * self.V[mask])
        return FMatrix(F, out)

    def pairwise_brackets(self, U: FMatrix, W: FMatrix) -> np.ndarray:
        """Coordinates of [u_x, w_y] for all rows u_x of U, w_y of W.

        Returns an int array of shape (len(U), len(W), dim, k).
        """
        return pairwise_products(self.csr, self.dim, U, W)

    def brackets_of_vectors(self, U: FMatrix, W: FMatrix) -> FMatrix:
        """Row-wise brackets [u_t, w_t] for two equally long lists of vectors."""
        F = U.field
        d, k = self.dim, F.k
        C = self.csr.reshape((d, d * d))
        conv = np.zeros((U.shape[0], d, 2 * k - 1), dtype=np.int64)
        for r in range(k):
            ur = U.data[..., r]
            if not ur.any():
                continue
            X = (sp.csr_matrix(ur) @ C).toarray().reshape(U.shape[0], d, d) % F.p
            for s in range(k):
                ws = W.data[..., s]
                if ws.any():
                    conv[..., r + s] += np.einsum("tjm,tj->tm", X, ws)
        return FMatrix(F, F.reduce_conv(conv) if k > 1 else conv % F.p)


def pairwise_products(csr: sp.csr_matrix, d: int, U: FMatrix, W: FMatrix) -> np.ndarray:
    """Bilinear products of all row pairs for a product with constants ``csr``.

    ``csr`` has rows indexed by i * d + j and columns by the output index.
    """
    F = U.field
    k, p = F.k, F.p
    out_conv = np.zeros((U.shape[0], W.shape[0], d, 2 * k - 1), dtype=np.int64)
    Ct = csr.reshape((d, d * d))
    for r in range(k):
        ur = U.data[..., r]
        if not ur.any():
            continue
        # X[x, j, m] = sum_i u_x[i] C[i, j, m]
        X = (sp.csr_matrix(ur) @ Ct).toarray().reshape(U.shape[0], d, d) % p
        for s in range(k):
            ws = W.data[..., s]
            if not ws.any():
                continue
            # [u_x, w_y]_m = sum_j X[x, j, m] w_y[j]
            out_conv[..., r + s] += np.einsum("xjm,yj->xym", X, ws, optimize=True)
    if k == 1:
        return out_conv % p
    return F.reduce_conv(out_conv)


def _build_table(shape: ShapeDescriptor) -> StructureTable:
    F = make_field(P, 1)
    basis = canonical_basis(shape)
    pos = _position(shape)
    elems = [basis_element(shape, F, b) for b in basis]
    I, J, M, V = [], [], [], []
    t0 = time.perf_counter()
    for i, y in enumerate(elems):
        for j, z in enumerate(elems):
            r = m_bracket(y, z)
            for b, c in r.terms():
                I.append(i)
                J.append(j)
                M.append(pos[b])
                V.append(c.coords[0])
    log.info("structure table for n=%s built in %.2fs (%d nonzeros)", shape.n, time.perf_counter() - t0, len(V))
    arr = lambda v: np.asarray(v, dtype=np.int64)
    return StructureTable(shape, arr(I), arr(J), arr(M), arr(V))


@lru_cache(maxsize=4)
def structure_table(shape: ShapeDescriptor) -> StructureTable:
    """Structure constants of M(2; n), computed once per shape from m_bracket."""
    _check_shape(shape)
    return _build_table(shape)


# ---------------------------------------------------------------------------
# sweeps over the table
# ---------------------------------------------------------------------------

def antisymmetry_failures(table: StructureTable) -> list[tuple[int, int]]:
    """Pairs (i, j) with [e_i, e_j] + [e_j, e_i] != 0."""
    d = table.dim
    C = table.csr
    perm = (np.arange(d * d) % d) * d + np.arange(d * d) // d
    S = (C + C[perm]).tocoo()
    S.data %= 5
    bad = np.flatnonzero(S.data)
    return sorted({(int(r // d), int(r % d)) for r in S.row[bad]})


def jacobiator(table: StructureTable, triples: np.ndarray) -> np.ndarray:
    """Rows [e_i,[e_j,e_l]] + [e_j,[e_l,e_i]] + [e_l,[e_i,e_j]] (mod 5) for each triple."""
    d = table.dim
    C = table.csr
    triples = np.asarray(triples, dtype=np.int64)
    total = None
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        i, j, l = triples[:, a], triples[:, b], triples[:, c]
        inner = C[j * d + l]  # (T, d)
        inner = inner.tocsr()
        nnz_per_row = np.diff(inner.indptr)
        cols = inner.indices + np.repeat(i * d, nnz_per_row)
        S = sp.csr_matrix((inner.data, cols, inner.indptr), shape=(len(triples), d * d))
        term = S @ C
        total = term if total is None else total + term
    total = total.tocsr()
    total.data %= 5
    total.eliminate_zeros()
    return total


def jacobi_failures(table: StructureTable, triples: np.ndarray, batch: int = 200_000) -> list[tuple[int, int, int]]:
    out = []
    for s in range(0, len(triples), batch):
        chunk = triples[s : s + batch]
        J = jacobiator(table, chunk)
        bad = np.flatnonzero(np.diff(J.indptr))
        out.extend(tuple(int(v) for v in chunk[r]) for r in bad)
    return out


def all_triples(dim: int) -> Iterable[np.ndarray]:
    """All dim^3 index triples, yielded in blocks with a fixed first index."""
    jl = np.array(np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")).reshape(2, -1).T
    for i in range(dim):
        yield np.column_stack([np.full(len(jl), i), jl])


def grading_failures_zz(table: StructureTable) -> list[tuple[int, int, int]]:
    """Nonzero structure constants violating deg_zz additivity."""
    basis = canonical_basis(table.shape)
    deg = np.array([deg_zz(b) for b in basis])
    bad = np.flatnonzero((deg[table.I] + deg[table.J] != deg[table.M]).any(axis=1))
    return [(int(table.I[t]), int(table.J[t]), int(table.M[t])) for t in bad]


def ideal_dimension(table: StructureTable, start: int, chunk: int = 32) -> int:
    """Dimension of the ideal generated by basis vector ``start`` (over GF(5))."""
    d = table.dim
    p = 5
    # S[k, i*d + m] = C[i, k, m], so a row vector v gives all [e_i, v] at once
    S = sp.csr_matrix((table.V.astype(np.float64), (table.J, table.I * d + table.M)), shape=(d, d * d))
    basis = np.zeros((1, d), dtype=np.int64)
    basis[0, start] = 1
    pivots = [start]
    frontier = basis.copy()
    while frontier.shape[0]:
        parts = []
        for s0 in range(0, frontier.shape[0], chunk):
            block = (S.T @ frontier[s0:s0 + chunk].T.astype(np.float64)).T
            cand = np.rint(block).astype(np.int64).reshape(-1, d) % p
            parts.append(cand[cand.any(axis=1)])
        cand = np.concatenate(parts)
        if not cand.shape[0]:
            break
        basis, pivots, frontier = _extend_rref(basis, pivots, cand, p)
        if len(pivots) == d:
            break
    return len(pivots)


def _normalize_rows(vecs: np.ndarray, p: int) -> np.ndarray:
    """Scale rows to leading coefficient 1 and drop duplicates."""
    lead = vecs[np.arange(len(vecs)), (vecs != 0).argmax(axis=1)]
    inv = np.array([pow(int(c), -1, p) for c in range(1, p)])
    vecs = vecs * inv[lead - 1][:, None] % p
    return np.unique(vecs, axis=0)


def _extend_rref(basis: np.ndarray, pivots: list[int], vecs: np.ndarray, p: int):
    """Add vecs to an RREF basis over GF(p); returns (basis, pivots, added rows)."""
    d = vecs.shape[1]
    if pivots:
        red = np.rint(vecs[:, pivots].astype(np.float64) @ basis.astype(np.float64)).astype(np.int64)
        vecs = (vecs - red) % p
    vecs = vecs[vecs.any(axis=1)]
    if not vecs.shape[0]:
        return basis, pivots, np.zeros((0, d), dtype=np.int64)
    vecs = _normalize_rows(vecs, p)
    R, piv = FMatrix.from_ints(make_field(p, 1), vecs).rref()
    R = R.to_ints()[: len(piv)]
    if basis.shape[0]:
        basis = (basis - basis[:, piv] @ R) % p
        all_rows = np.vstack([basis, R])
    else:
        all_rows = R
    all_piv = pivots + piv
    order = np.argsort(all_piv)
    return all_rows[order], [all_piv[t] for t in order], R
