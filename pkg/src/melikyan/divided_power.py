"""The divided power algebra O(m; n) over GF(p^k).

Monomials ``x^(a)`` are indexed by tuples ``0 <= a <= tau(n)`` with
``tau(n)_i = p^{n_i} - 1``.  Multiplication follows
``x^(a) x^(b) = binom(a+b, a) x^(a+b)``; a product whose exponent leaves the
box is zero (a carry in some base-p digit forces the binomial to vanish).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

from .finite_field import FieldDescriptor, FieldElement, multi_binom

MultiIndex = tuple[int, ...]

__all__ = [
    "ShapeDescriptor",
    "DividedPowerPoly",
    "MultiIndex",
    "multiply",
    "partial",
    "deg_O",
    "basis",
]


@dataclass(frozen=True)
class ShapeDescriptor:
    n: tuple[int, ...]
    p: int = 5

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        if not self.n or any(v < 1 for v in self.n):
            raise ValueError(f"n must be a nonempty tuple of positive integers, got {self.n}")

    @property
    def m(self) -> int:
        return len(self.n)

    @cached_property
    def tau(self) -> MultiIndex:
        return tuple(self.p**ni - 1 for ni in self.n)

    @property
    def dim(self) -> int:
        """Dimension of O(m; n)."""
        return self.p ** sum(self.n)

    def check_index(self, a: Iterable[int]) -> MultiIndex:
        a = tuple(int(v) for v in a)
        if len(a) != self.m:
            raise ValueError(f"multi-index {a} has length {len(a)}, expected {self.m}")
        if any(v < 0 or v > t for v, t in zip(a, self.tau)):
            raise ValueError(f"multi-index {a} outside 0 <= a <= {self.tau}")
        return a

    def unit(self, i: int) -> MultiIndex:
        """epsilon_i for 1 <= i <= m."""
        if not 1 <= i <= self.m:
            raise IndexError(f"axis {i} out of range 1..{self.m}")
        return tuple(int(j == i - 1) for j in range(self.m))

    @cached_property
    def basis(self) -> tuple[MultiIndex, ...]:
        return tuple(itertools.product(*(range(t + 1) for t in self.tau)))

    @cached_property
    def index_of(self) -> dict[MultiIndex, int]:
        return {a: i for i, a in enumerate(self.basis)}


def basis(shape: ShapeDescriptor) -> tuple[MultiIndex, ...]:
    """All multi-indices 0 <= a <= tau(n) in lexicographic order."""
    return shape.basis


def deg_O(a: Iterable[int]) -> int:
    return sum(a)


@lru_cache(maxsize=1 << 20)
def _mono_coeff(a: MultiIndex, b: MultiIndex, tau: MultiIndex, p: int) -> int:
    if any(x + y > t for x, y, t in zip(a, b, tau)):
        return 0
    return multi_binom(a, b, p)


class DividedPowerPoly:
    """Sparse element of O(m; n): a map from multi-indices to nonzero scalars."""

    __slots__ = ("shape", "field", "terms")

    def __init__(self, shape: ShapeDescriptor, field: FieldDescriptor, terms: Mapping[MultiIndex, FieldElement] | None = None):
        if field.p != shape.p:
            raise ValueError("field characteristic differs from the shape's prime")
        self.shape = shape
        self.field = field
        clean: dict[MultiIndex, FieldElement] = {}
        for a, c in (terms or {}).items():
            c = field.element(c)
            if not c.is_zero():
                clean[shape.check_index(a)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, shape, field, terms):
        obj = cls.__new__(cls)
        obj.shape, obj.field, obj.terms = shape, field, terms
        return obj

    @classmethod
    def zero(cls, shape, field):
        return cls._raw(shape, field, {})

    @classmethod
    def monomial(cls, shape, field, a, coeff=1):
        return cls(shape, field, {tuple(a): field.element(coeff)})

    @classmethod
    def constant(cls, shape, field, c=1):
        return cls.monomial(shape, field, (0,) * shape.m, c)

    @classmethod
    def x(cls, shape, field, i):
        """The coordinate function x_i = x^(epsilon_i)."""
        return cls.monomial(shape, field, shape.unit(i))

    def _check(self, other: "DividedPowerPoly"):
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if other.field != self.field:
            raise ValueError("polynomials over different fields")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DividedPowerPoly):
            return NotImplemented
        return self.shape == other.shape and self.field == other.field and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "DividedPowerPoly") -> "DividedPowerPoly":
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            s = out.get(a)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(a, None)
            else:
                out[a] = s
        return DividedPowerPoly._raw(self.shape, self.field, out)

    def __neg__(self):
        return DividedPowerPoly._raw(self.shape, self.field, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DividedPowerPoly":
        c = self.field.element(c)
        if c.is_zero():
            return DividedPowerPoly.zero(self.shape, self.field)
        return DividedPowerPoly._raw(self.shape, self.field, {a: v * c for a, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DividedPowerPoly):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c!r}*x^{a}" for a, c in sorted(self.terms.items()))


def multiply(f: DividedPowerPoly, g: DividedPowerPoly) -> DividedPowerPoly:
    f._check(g)
    shape, tau, p = f.shape, f.shape.tau, f.shape.p
    out: dict[MultiIndex, FieldElement] = {}
    for a, ca in f.terms.items():
        for b, cb in g.terms.items():
            c = _mono_coeff(a, b, tau, p)
            if not c:
                continue
            s = tuple(x + y for x, y in zip(a, b))
            v = ca * cb * c
            prev = out.get(s)
            v = v if prev is None else prev + v
            if v.is_zero():
                out.pop(s, None)
            else:
                out[s] = v
    return DividedPowerPoly._raw(shape, f.field, out)


def partial(i: int, f: DividedPowerPoly) -> DividedPowerPoly:
    """The standard derivation d_i (1-based axis): x^(a) -> x^(a - eps_i)."""
    if not 1 <= i <= f.shape.m:
        raise IndexError(f"axis {i} out of range 1..{f.shape.m}")
    j = i - 1
    out = {}
    for a, c in f.terms.items():
        if a[j]:
            b = a[:j] + (a[j] - 1,) + a[j + 1 :]
            out[b] = c
    return DividedPowerPoly._raw(f.shape, f.field, out)
