"""Finitely generated abelian groups Z^r x Z/m_1 x ... x Z/m_s, their
homomorphisms, subgroups and characters.

An element is stored as a flat integer vector: r free coordinates followed by
s torsion coordinates reduced into ``[0, m_j)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Sequence

from .finite_field import CharacteristicError, FieldDescriptor, FieldElement, FieldTooSmall, root_of_unity
from .intlinalg import hnf, inverse_unimodular, smith, solve_rows

__all__ = [
    "AbelianGroup",
    "GroupElement",
    "GroupHom",
    "Subgroup",
    "Character",
    "Z",
    "Z2",
    "cyclic",
    "hom_apply",
    "subgroup_generated",
    "character_group",
    "generator_characters",
    "augmentation",
    "phi_M",
    "pullback_character",
]


@dataclass(frozen=True)
class AbelianGroup:
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(m) for m in self.torsion))
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        for m in self.torsion:
            if m < 2:
                raise ValueError(f"invariant factors must be >= 2, got {m}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisibility chain")

    @classmethod
    def from_presentation(cls, ngens: int, relations: Sequence[Sequence[int]]) -> tuple["AbelianGroup", "GroupHom"]:
        """Normalise Z^ngens / <relations>; returns the group and the quotient map from Z^ngens."""
        D, U, V = smith(relations, ngens) if relations else ([], [], [[int(i == j) for j in range(ngens)] for i in range(ngens)])
        diag = [D[i][i] if i < len(D) else 0 for i in range(ngens)]
        # new generators are rows of V^{-1}; coordinates transform by x -> x V
        tors = [(i, d) for i, d in enumerate(diag) if d > 1]
        free = [i for i, d in enumerate(diag) if d == 0]
        G = cls(len(free), tuple(d for _, d in tors))
        order = free + [i for i, _ in tors]
        src = cls(ngens)
        images = []
        for e in range(ngens):
            row = V[e]
            images.append(G.element([row[i] for i in order]))
        return G, GroupHom(src, G, tuple(images))

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def order(self) -> int | None:
        return math.prod(self.torsion) if self.is_finite else None

    @property
    def exponent(self) -> int | None:
        if not self.is_finite:
            return None
        return self.torsion[-1] if self.torsion else 1

    def has_order_p_elements(self, p: int) -> bool:
        return bool(self.torsion) and self.torsion[-1] % p == 0

    def element(self, coords: Iterable[int]) -> "GroupElement":
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.ngens:
            raise ValueError(f"{self} needs {self.ngens} coordinates, got {len(coords)}")
        return GroupElement(self, coords[: self.rank], tuple(c % m for c, m in zip(coords[self.rank :], self.torsion)))

    @property
    def identity(self) -> "GroupElement":
        return self.element([0] * self.ngens)

    def generators(self) -> list["GroupElement"]:
        return [self.element([int(i == j) for j in range(self.ngens)]) for i in range(self.ngens)]

    def elements(self) -> list["GroupElement"]:
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite group")
        return [self.element(c) for c in itertools.product(*(range(m) for m in self.torsion))]

    def __str__(self):
        parts = (["Z"] * self.rank if self.rank <= 1 else [f"Z^{self.rank}"]) + [f"Z/{m}" for m in self.torsion]
        return " x ".join(parts) if parts else "trivial"


def Z(rank: int = 1) -> AbelianGroup:
    return AbelianGroup(rank)


Z2 = AbelianGroup(2)


def cyclic(m: int) -> AbelianGroup:
    return AbelianGroup(0, (m,))


@dataclass(frozen=True)
class GroupElement:
    group: AbelianGroup
    free: tuple[int, ...]
    torsion: tuple[int, ...]

    @property
    def coords(self) -> tuple[int, ...]:
        return self.free + self.torsion

    def _same(self, other):
        if other.group != self.group:
            raise ValueError(f"elements of different groups {self.group} and {other.group}")

    def __add__(self, other):
        self._same(other)
        return self.group.element(a + b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return self.group.element(-a for a in self.coords)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n: int):
        return self.group.element(n * a for a in self.coords)

    __rmul__ = __mul__

    def is_identity(self) -> bool:
        return not any(self.coords)

    def order(self) -> int | None:
        if any(self.free):
            return None
        o = 1
        for c, m in zip(self.torsion, self.group.torsion):
            o = math.lcm(o, m // math.gcd(c, m))
        return o

    def __repr__(self):
        return f"{self.coords}" if self.group.ngens != 1 else f"{self.coords[0]}"


@dataclass(frozen=True)
class GroupHom:
    domain: AbelianGroup
    codomain: AbelianGroup
    images: tuple[GroupElement, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.domain.ngens:
            raise ValueError(f"need {self.domain.ngens} images, got {len(images)}")
        for img in images:
            if img.group != self.codomain:
                raise ValueError("image outside the codomain")
        for m, img in zip(self.domain.torsion, images[self.domain.rank :]):
            if not (img * m).is_identity():
                raise ValueError(f"not well defined: generator of order {m} maps to {img} of order {img.order()}")

    @classmethod
    def from_matrix(cls, domain, codomain, rows: Sequence[Sequence[int]]) -> "GroupHom":
        """rows[j] = coordinates of the image of the j-th generator."""
        return cls(domain, codomain, tuple(codomain.element(r) for r in rows))

    @classmethod
    def identity(cls, G: AbelianGroup) -> "GroupHom":
        return cls(G, G, tuple(G.generators()))

    @classmethod
    def zero(cls, G: AbelianGroup, H: AbelianGroup) -> "GroupHom":
        return cls(G, H, tuple(H.identity for _ in range(G.ngens)))

    def __call__(self, g: GroupElement) -> GroupElement:
        return hom_apply(self, g)

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self o inner."""
        if inner.codomain != self.domain:
            raise ValueError("cannot compose: codomain/domain mismatch")
        return GroupHom(inner.domain, self.codomain, tuple(self(img) for img in inner.images))

    def is_onto(self) -> bool:
        return subgroup_generated(self.images, self.codomain).index == 1

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.images == other.images

    def __hash__(self):
        return hash((self.domain, self.codomain, self.images))


def hom_apply(phi: GroupHom, g: GroupElement) -> GroupElement:
    if g.group != phi.domain:
        raise ValueError(f"{g} is not in the domain {phi.domain}")
    acc = [0] * phi.codomain.ngens
    for c, img in zip(g.coords, phi.images):
        if c:
            acc = [a + c * b for a, b in zip(acc, img.coords)]
    return phi.codomain.element(acc)


def augmentation(rank: int = 2) -> GroupHom:
    """(a_1, ..., a_r) -> a_1 + ... + a_r."""
    return GroupHom.from_matrix(Z(rank), Z(1), [[1]] * rank)


def phi_M() -> GroupHom:
    """(1, 0) -> (3, 0), (0, 1) -> (1, 1)."""
    return GroupHom.from_matrix(Z2, Z2, [[3, 0], [1, 1]])


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subgroup:
    """The subgroup K of ``ambient`` generated by ``generators``.

    ``group`` is K in invariant-factor form and ``inclusion`` maps it into
    the ambient group.
    """

    ambient: AbelianGroup
    generators: tuple[GroupElement, ...]
    group: AbelianGroup
    inclusion: GroupHom
    _lattice: tuple[tuple[int, ...], ...] = dc_field(repr=False)
    _to_new: tuple[tuple[int, ...], ...] = dc_field(repr=False)
    _kept: tuple[int, ...] = dc_field(repr=False)

    def coordinates(self, g: GroupElement) -> GroupElement | None:
        """g as an element of ``group`` or None when g is not in K."""
        if g.group != self.ambient:
            raise ValueError("element of another group")
        c = solve_rows(self._lattice, g.coords)
        if c is None:
            return None
        new = [sum(ci * self._to_new[i][j] for i, ci in enumerate(c)) for j in range(len(self._to_new[0]))] if self._to_new else []
        return self.group.element([new[j] for j in self._kept])

    def contains(self, g: GroupElement) -> bool:
        return self.coordinates(g) is not None

    @cached_property
    def index(self) -> int | None:
        """[ambient : K], or None when infinite."""
        n = self.ambient.ngens
        if len(self._lattice) < n:
            return None
        # K = L / R inside Z^n / R, so the index is [Z^n : L] = det of the HNF basis
        return math.prod(self._lattice[i][i] for i in range(n))

    def is_whole_group(self) -> bool:
        return self.index == 1


def subgroup_generated(S: Iterable[GroupElement], ambient: AbelianGroup | None = None) -> Subgroup:
    """Describe the subgroup generated by S via Hermite/Smith normal forms."""
    S = tuple(S)
    if ambient is None:
        if not S:
            raise ValueError("empty generating set needs an explicit ambient group")
        ambient = S[0].group
    for g in S:
        if g.group != ambient:
            raise ValueError("generators lie in different groups")
    n, r = ambient.ngens, ambient.rank
    relations = [[m * int(i == r + j) for i in range(n)] for j, m in enumerate(ambient.torsion)]
    rows = [list(g.coords) for g in S] + relations
    H, _, piv = hnf(rows, n) if rows else ([], [], [])
    L = [H[i] for i in range(len(piv))]  # basis of the lattice
    rho = len(L)
    if rho == 0:
        K = AbelianGroup()
        return Subgroup(ambient, S, K, GroupHom(K, ambient, ()), (), (), ())
    # relations of K = relation lattice of the ambient written in the L basis
    rel_coords = [solve_rows(L, rel) for rel in relations]
    D, U, V = smith(rel_coords, rho) if rel_coords else ([], [], [[int(i == j) for j in range(rho)] for i in range(rho)])
    diag = [D[i][i] if i < len(D) else 0 for i in range(rho)]
    Vinv = inverse_unimodular(V)
    new_basis = [[sum(Vinv[a][b] * L[b][c] for b in range(rho)) for c in range(n)] for a in range(rho)]
    free = [i for i, d in enumerate(diag) if d == 0]
    tors = [i for i, d in enumerate(diag) if d > 1]
    K = AbelianGroup(len(free), tuple(diag[i] for i in tors))
    kept = tuple(free + tors)
    inclusion = GroupHom(K, ambient, tuple(ambient.element(new_basis[i]) for i in kept))
    return Subgroup(
        ambient, S, K, inclusion,
        tuple(tuple(row) for row in L),
        tuple(tuple(row) for row in V),
        kept,
    )


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    """A homomorphism from G into the multiplicative group of a field.

    ``values`` lists the images of the generators; free generators may go to
    any nonzero scalar (so characters of Z^2 are torus points).
    """

    group: AbelianGroup
    field: FieldDescriptor
    values: tuple[FieldElement, ...]

    def __post_init__(self):
        if len(self.values) != self.group.ngens:
            raise ValueError("one value per generator is required")
        for v in self.values:
            if v.field != self.field:
                raise ValueError("character value outside the character's field")
            if v.is_zero():
                raise ValueError("character values must be nonzero")
        for m, v in zip(self.group.torsion, self.values[self.group.rank:]):
            if v ** m != self.field.one:
                raise ValueError(f"value {v} has order not dividing {m}")

    def __call__(self, g: GroupElement) -> FieldElement:
        if g.group != self.group:
            raise ValueError("element of another group")
        acc = self.field.one
        for c, v in zip(g.coords, self.values):
            if c:
                acc = acc * v**c
        return acc

    def __mul__(self, other: "Character") -> "Character":
        if other.group != self.group or other.field != self.field:
            raise ValueError("characters of different groups")
        return Character(self.group, self.field, tuple(a * b for a, b in zip(self.values, other.values)))

    def is_trivial(self) -> bool:
        return all(v == self.field.one for v in self.values)


def _check_dualizable(G: AbelianGroup, f: FieldDescriptor):
    if not G.is_finite:
        raise ValueError("the dual of an infinite group is not enumerable")
    if G.has_order_p_elements(f.p):
        raise CharacteristicError(
            f"{G} has elements of order {f.p}; no characters separate them in characteristic {f.p}"
        )
    e = G.exponent
    if (f.order - 1) % e:
        raise FieldTooSmall(f"exponent {e} of {G} does not divide {f.order - 1}; extend the field")


def generator_characters(G: AbelianGroup, f: FieldDescriptor) -> list[Character]:
    """chi_j with chi_j(e_i) = zeta_{m_j}^{delta_ij}; they generate the dual group."""
    _check_dualizable(G, f)
    roots = [root_of_unity(f, m) for m in G.torsion]
    out = []
    for j in range(G.ngens):
        out.append(Character(G, f, tuple(roots[i] if i == j else f.one for i in range(G.ngens))))
    return out


def character_group(G: AbelianGroup, f: FieldDescriptor) -> list[Character]:
    """All |G| characters, indexed by exponent tuples against fixed primitive roots."""
    _check_dualizable(G, f)
    roots = [root_of_unity(f, m) for m in G.torsion]
    out = []
    for exps in itertools.product(*(range(m) for m in G.torsion)):
        out.append(Character(G, f, tuple(r**e for r, e in zip(roots, exps))))
    return out


def pullback_character(chi: Character, phi: GroupHom) -> Character:
    """The character chi o phi of phi's domain."""
    if phi.codomain != chi.group:
        raise ValueError("homomorphism codomain differs from the character's group")
    return Character(phi.domain, chi.field, tuple(chi(img) for img in phi.images))
