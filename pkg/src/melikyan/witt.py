"""Special derivations W(m; n) of O(m; n), divergence, and the tilde copy."""

from __future__ import annotations

from typing import Sequence

from .divided_power import DividedPowerPoly, ShapeDescriptor, deg_O, multiply, partial
from .finite_field import FieldDescriptor

__all__ = [
    "VectorField",
    "TildeField",
    "apply",
    "witt_bracket",
    "divergence",
    "tilde",
    "untilde",
    "deg_W",
]


class _Fields:
    __slots__ = ("shape", "field", "components")

    def __init__(self, shape: ShapeDescriptor, field: FieldDescriptor, components: Sequence[DividedPowerPoly]):
        components = tuple(components)
        if len(components) != shape.m:
            raise ValueError(f"expected {shape.m} components, got {len(components)}")
        for c in components:
            if c.shape != shape or c.field != field:
                raise ValueError("component does not share the shape/field")
        self.shape, self.field, self.components = shape, field, components

    @classmethod
    def zero(cls, shape, field):
        z = DividedPowerPoly.zero(shape, field)
        return cls(shape, field, (z,) * shape.m)

    @classmethod
    def basis_element(cls, shape, field, a, i, coeff=1):
        """x^(a) times the i-th (1-based) basis derivation."""
        z = DividedPowerPoly.zero(shape, field)
        comps = [z] * shape.m
        comps[i - 1] = DividedPowerPoly.monomial(shape, field, a, coeff)
        return cls(shape, field, comps)

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.shape != self.shape or other.field != self.field:
            raise ValueError("shape mismatch")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.shape == other.shape and self.components == other.components

    __hash__ = None

    def __add__(self, other):
        self._same(other)
        return type(self)(self.shape, self.field, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        self._same(other)
        return type(self)(self.shape, self.field, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return type(self)(self.shape, self.field, [-a for a in self.components])

    def scale(self, c):
        return type(self)(self.shape, self.field, [a.scale(c) for a in self.components])

    def times(self, f: DividedPowerPoly):
        """Multiply every component by the function f."""
        return type(self)(self.shape, self.field, [multiply(f, a) for a in self.components])

    def __repr__(self):
        sym = self._symbol
        parts = [f"({c!r}){sym}{i + 1}" for i, c in enumerate(self.components) if c]
        return " + ".join(parts) if parts else "0"


class VectorField(_Fields):
    """sum_i f_i d_i in W(m; n)."""

    _symbol = "d"


class TildeField(_Fields):
    """f_1 d~_1 + f_2 d~_2, a vector in the tilde copy of W(2; n)."""

    _symbol = "d~"

    def __init__(self, shape, field, components):
        if shape.m != 2:
            raise ValueError("the tilde copy exists only for m = 2")
        super().__init__(shape, field, components)


def apply(D: VectorField, f: DividedPowerPoly) -> DividedPowerPoly:
    """D(f) = sum_i f_i * d_i(f)."""
    if D.shape != f.shape:
        raise ValueError("shape mismatch")
    out = DividedPowerPoly.zero(f.shape, f.field)
    for i, fi in enumerate(D.components, start=1):
        if fi:
            out = out + multiply(fi, partial(i, f))
    return out


def witt_bracket(D: VectorField, E: VectorField) -> VectorField:
    """Bilinear extension of [f d_i, g d_j] = f d_i(g) d_j - g d_j(f) d_i."""
    D._same(E)
    shape, field = D.shape, D.field
    comps = [DividedPowerPoly.zero(shape, field) for _ in range(shape.m)]
    for i, f in enumerate(D.components, start=1):
        if not f:
            continue
        for j, g in enumerate(E.components, start=1):
            if not g:
                continue
            comps[j - 1] = comps[j - 1] + multiply(f, partial(i, g))
            comps[i - 1] = comps[i - 1] - multiply(g, partial(j, f))
    return VectorField(shape, field, comps)


def divergence(D: VectorField) -> DividedPowerPoly:
    if D.shape.m != 2:
        raise ValueError("divergence is defined here for m = 2 only")
    f1, f2 = D.components
    return partial(1, f1) + partial(2, f2)


def tilde(D: VectorField) -> TildeField:
    if not isinstance(D, VectorField):
        raise TypeError("tilde takes a VectorField")
    if D.shape.m != 2:
        raise ValueError("the tilde map is defined for m = 2 only")
    return TildeField(D.shape, D.field, D.components)


def untilde(E: TildeField) -> VectorField:
    """Inverse of tilde."""
    return VectorField(E.shape, E.field, E.components)


def deg_W(a: Sequence[int], i: int | None = None) -> int:
    """Canonical degree of x^(a) d_i; independent of i."""
    return deg_O(a) - 1
