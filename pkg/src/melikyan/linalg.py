"""Dense exact matrices over GF(p^k).

A matrix is an int64 array of shape ``(rows, cols, k)``; the trailing axis
holds polynomial-basis coordinates.  Products are computed coordinate by
coordinate with float64 BLAS and reduced mod p afterwards, which is exact as
long as ``cols * (p - 1)**2 * k < 2**53``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .finite_field import FieldDescriptor, FieldElement

__all__ = ["FMatrix", "matmul_coords"]


def _blas_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)


def matmul_coords(field: FieldDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of coordinate arrays (m, n, k) @ (n, l, k)."""
    k, p = field.k, field.p
    if k == 1:
        return (_blas_matmul(a[..., 0] % p, b[..., 0] % p) % p)[..., None]
    conv = np.zeros((a.shape[0], b.shape[1], 2 * k - 1), dtype=np.int64)
    for r in range(k):
        ar = a[..., r]
        if not ar.any():
            continue
        for s in range(k):
            bs = b[..., s]
            if bs.any():
                conv[..., r + s] += _blas_matmul(ar, bs)
    return field.reduce_conv(conv)


class FMatrix:
    """Immutable-by-convention dense matrix over a finite field."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldDescriptor, data: np.ndarray):
        data = np.asarray(data, dtype=np.int64)
        if data.ndim != 3 or data.shape[2] != field.k:
            raise ValueError(f"expected (rows, cols, {field.k}) coordinates, got {data.shape}")
        self.field = field
        self.data = data % field.p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, np.zeros((rows, cols, field.k), dtype=np.int64))

    @classmethod
    def identity(cls, field, n):
        d = np.zeros((n, n, field.k), dtype=np.int64)
        d[np.arange(n), np.arange(n), 0] = 1
        return cls(field, d)

    @classmethod
    def from_ints(cls, field, arr) -> "FMatrix":
        """Embed an integer (prime-field) matrix."""
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr[None, :]
        d = np.zeros(arr.shape + (field.k,), dtype=np.int64)
        d[..., 0] = arr % field.p
        return cls(field, d)

    @classmethod
    def from_elements(cls, field, rows: Sequence[Sequence[FieldElement]]) -> "FMatrix":
        d = np.array([[field.element(x).coords for x in row] for row in rows], dtype=np.int64)
        if d.size == 0:
            d = d.reshape(len(rows), 0, field.k)
        return cls(field, d)

    @classmethod
    def diagonal(cls, field, entries: Sequence[FieldElement]) -> "FMatrix":
        n = len(entries)
        d = np.zeros((n, n, field.k), dtype=np.int64)
        d[np.arange(n), np.arange(n)] = np.array([field.element(e).coords for e in entries], dtype=np.int64).reshape(n, field.k)
        return cls(field, d)

    @classmethod
    def vstack(cls, field, mats: Iterable["FMatrix"], cols: int) -> "FMatrix":
        parts = [m.data for m in mats]
        if not parts:
            return cls.zeros(field, 0, cols)
        return cls(field, np.concatenate(parts, axis=0))

    # -- basic properties ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def __repr__(self):
        return f"FMatrix({self.field!r}, shape={self.shape})"

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.field, tuple(int(c) for c in self.data[i, j]))

    def row(self, i: int) -> "FMatrix":
        return FMatrix(self.field, self.data[i : i + 1])

    def rows(self, idx) -> "FMatrix":
        return FMatrix(self.field, self.data[np.asarray(idx, dtype=np.int64)])

    def cols(self, idx) -> "FMatrix":
        return FMatrix(self.field, self.data[:, np.asarray(idx, dtype=np.int64)])

    def submatrix(self, rows, cols) -> "FMatrix":
        r = np.asarray(rows, dtype=np.int64)
        c = np.asarray(cols, dtype=np.int64)
        return FMatrix(self.field, self.data[np.ix_(r, c)])

    @property
    def T(self) -> "FMatrix":
        return FMatrix(self.field, self.data.transpose(1, 0, 2))

    def nonzero_mask(self) -> np.ndarray:
        return self.data.any(axis=2)

    def is_zero(self) -> bool:
        return not self.data.any()

    def is_diagonal(self) -> bool:
        mask = self.nonzero_mask().copy()
        n = min(self.shape)
        mask[np.arange(n), np.arange(n)] = False
        return not mask.any()

    def diagonal_entries(self) -> list[FieldElement]:
        n = min(self.shape)
        return [self.entry(i, i) for i in range(n)]

    def in_prime_field(self) -> bool:
        return not self.data[..., 1:].any()

    def to_ints(self) -> np.ndarray:
        if not self.in_prime_field():
            raise ValueError("matrix has entries outside the prime field")
        return self.data[..., 0].copy()

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "FMatrix"):
        if other.field != self.field:
            raise ValueError("matrices over different fields")

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        self._check(other)
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return FMatrix(self.field, matmul_coords(self.field, self.data, other.data))

    def __add__(self, other: "FMatrix") -> "FMatrix":
        self._check(other)
        return FMatrix(self.field, self.data + other.data)

    def __sub__(self, other: "FMatrix") -> "FMatrix":
        self._check(other)
        return FMatrix(self.field, self.data - other.data)

    def __neg__(self):
        return FMatrix(self.field, -self.data)

    def scale(self, c) -> "FMatrix":
        c = self.field.element(c)
        return FMatrix(self.field, self.field.mul_arrays(self.data, np.array(c.coords, dtype=np.int64)))

    def __eq__(self, other):
        if not isinstance(other, FMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def power(self, e: int) -> "FMatrix":
        n = self.shape[0]
        result = FMatrix.identity(self.field, n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def embed(self, emb) -> "FMatrix":
        """Image under a field embedding."""
        return FMatrix(emb.target, emb.coords_array(self.data))

    # -- row reduction ------------------------------------------------------

    def rref(self) -> tuple["FMatrix", list[int]]:
        """Reduced row echelon form and pivot columns."""
        F = self.field
        A = self.data.copy()
        rows, cols = self.shape
        pivots: list[int] = []
        r = 0
        if F.k == 1:
            A2 = A[..., 0]
            p = F.p
            for c in range(cols):
                if r == rows:
                    break
                nz = np.flatnonzero(A2[r:, c])
                if nz.size == 0:
                    continue
                piv = r + nz[0]
                if piv != r:
                    A2[[r, piv]] = A2[[piv, r]]
                A2[r] = A2[r] * pow(int(A2[r, c]), -1, p) % p
                col = A2[:, c].copy()
                col[r] = 0
                nzr = np.flatnonzero(col)
                if nzr.size:
                    A2[nzr] = (A2[nzr] - np.outer(col[nzr], A2[r])) % p
                pivots.append(c)
                r += 1
            return FMatrix(F, A2[..., None]), pivots
        for c in range(cols):
            if r == rows:
                break
            nz = np.flatnonzero(A[r:, c].any(axis=1))
            if nz.size == 0:
                continue
            piv = r + nz[0]
            if piv != r:
                A[[r, piv]] = A[[piv, r]]
            A[r] = F.mul_arrays(A[r], F.inv_coords(A[r, c]))
            col = A[:, c].copy()
            col[r] = 0
            nzr = np.flatnonzero(col.any(axis=1))
            if nzr.size:
                A[nzr] = (A[nzr] - F.mul_arrays(col[nzr][:, None, :], A[r][None, :, :])) % F.p
            pivots.append(c)
            r += 1
        return FMatrix(F, A), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def row_space(self) -> "FMatrix":
        """Canonical basis (nonzero rows of the RREF) of the row space."""
        R, piv = self.rref()
        return FMatrix(self.field, R.data[: len(piv)])

    def nullspace(self) -> "FMatrix":
        """Basis (as rows) of {v : self @ v = 0}."""
        R, piv = self.rref()
        cols = self.shape[1]
        free = [c for c in range(cols) if c not in set(piv)]
        out = np.zeros((len(free), cols, self.field.k), dtype=np.int64)
        for t, fcol in enumerate(free):
            out[t, fcol, 0] = 1
            for i, pc in enumerate(piv):
                out[t, pc] = (-R.data[i, fcol]) % self.field.p
        return FMatrix(self.field, out)

    def inverse(self) -> "FMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of a non-square matrix")
        aug = FMatrix(self.field, np.concatenate([self.data, FMatrix.identity(self.field, n).data], axis=1))
        R, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise np.linalg.LinAlgError("matrix is singular")
        return FMatrix(self.field, R.data[:, n:])

    def is_invertible(self) -> bool:
        n, m = self.shape
        return n == m and self.rank() == n


def reduce_rows(basis_rref: FMatrix, pivots: list[int], vectors: FMatrix) -> FMatrix:
    """Residues of row vectors after eliminating the pivot columns of an RREF basis.

    A zero residue means the vector lies in the row space of the basis.
    """
    if not pivots:
        return vectors
    F = vectors.field
    coeff = vectors.cols(pivots)
    return vectors - FMatrix(F, matmul_coords(F, coeff.data, basis_rref.data))


def same_row_space(a: FMatrix, b: FMatrix) -> bool:
    ra, rb = a.row_space(), b.row_space()
    return ra == rb
