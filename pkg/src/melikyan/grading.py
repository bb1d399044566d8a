"""Group gradings of M(2; n): construction, verification, coarsening and
recovery of the coarsening homomorphism.

A general grading is a list of ``(label, basis)`` pairs whose bases (rows of
an FMatrix in canonical coordinates) together span the algebra.  A monomial
grading assigns a label to every canonical basis vector.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .abelian import AbelianGroup, GroupElement, GroupHom, Subgroup, Z, Z2, subgroup_generated
from .divided_power import ShapeDescriptor
from .finite_field import FieldDescriptor, make_field
from .intlinalg import solve_rows
from .linalg import FMatrix, reduce_rows
from .melikyan import canonical_basis, deg_canonical, deg_standard, deg_zz, structure_table

__all__ = [
    "Grading",
    "MonomialGrading",
    "Verdict",
    "NotARefinement",
    "RecoveredHom",
    "verify_grading",
    "standard_grading",
    "zz_grading",
    "canonical_grading",
    "coarsen",
    "support",
    "recover_homomorphism",
    "apply_automorphism",
    "same_grading",
    "find_relabeling",
]


class Grading:
    """A decomposition of M(2; n) into subspaces labelled by group elements."""

    def __init__(self, shape: ShapeDescriptor, field: FieldDescriptor, group: AbelianGroup,
                 components: Sequence[tuple[GroupElement, FMatrix]], check: bool = True):
        self.shape, self.field, self.group = shape, field, group
        comps = []
        seen = set()
        for label, B in components:
            if label.group != group:
                raise ValueError(f"label {label} is not in {group}")
            if label in seen:
                raise ValueError(f"label {label} used for two components")
            if B.field != field or B.shape[1] != self.dim:
                raise ValueError("component basis has the wrong field or length")
            seen.add(label)
            if B.shape[0]:
                comps.append((label, B))
        self.components: tuple[tuple[GroupElement, FMatrix], ...] = tuple(comps)
        if check:
            total = sum(B.shape[0] for _, B in comps)
            if total != self.dim:
                raise ValueError(f"component dimensions sum to {total}, expected {self.dim}")
            stacked = FMatrix.vstack(field, (B for _, B in comps), self.dim)
            if stacked.rank() != self.dim:
                raise ValueError("component subspaces are not independent")

    @property
    def dim(self) -> int:
        return 5 * self.shape.dim

    @property
    def labels(self) -> list[GroupElement]:
        return [g for g, _ in self.components]

    def component(self, label: GroupElement) -> FMatrix | None:
        for g, B in self.components:
            if g == label:
                return B
        return None

    @cached_property
    def _rref(self) -> dict[GroupElement, tuple[FMatrix, list[int]]]:
        out = {}
        for g, B in self.components:
            R, piv = B.rref()
            out[g] = (FMatrix(self.field, R.data[: len(piv)]), piv)
        return out

    def residue(self, label: GroupElement, vectors: FMatrix) -> FMatrix:
        """Residues of ``vectors`` modulo the component labelled ``label``."""
        if label not in self._rref:
            return vectors
        R, piv = self._rref[label]
        return reduce_rows(R, piv, vectors)

    def dims(self) -> dict[GroupElement, int]:
        return {g: B.shape[0] for g, B in self.components}

    def is_monomial(self) -> bool:
        return False

    @cached_property
    def verdict(self) -> "Verdict":
        """Cached result of verify_grading."""
        return verify_grading(self)

    def __repr__(self):
        return f"{type(self).__name__}({self.group}, {len(self.components)} components)"


class MonomialGrading(Grading):
    """A grading in which every canonical basis vector is homogeneous."""

    def __init__(self, shape: ShapeDescriptor, field: FieldDescriptor, group: AbelianGroup,
                 degrees: Sequence[GroupElement]):
        degrees = tuple(degrees)
        dim = 5 * shape.dim
        if len(degrees) != dim:
            raise ValueError(f"need {dim} degrees, got {len(degrees)}")
        self.degrees = degrees
        groups: dict[GroupElement, list[int]] = defaultdict(list)
        for i, g in enumerate(degrees):
            groups[g].append(i)
        comps = []
        for g, idx in groups.items():
            data = np.zeros((len(idx), dim, field.k), dtype=np.int64)
            data[np.arange(len(idx)), idx, 0] = 1
            comps.append((g, FMatrix(field, data)))
        self.index_sets = {g: tuple(idx) for g, idx in groups.items()}
        super().__init__(shape, field, group, comps, check=False)

    def is_monomial(self) -> bool:
        return True

    def label_array(self) -> np.ndarray:
        return np.array([g.coords for g in self.degrees], dtype=np.int64).reshape(len(self.degrees), self.group.ngens)


@dataclass
class Verdict:
    ok: bool
    witness: dict[str, Any] | None = None

    def __bool__(self):
        return self.ok


class NotARefinement(ValueError):
    def __init__(self, message: str, witness: dict[str, Any]):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# distinguished monomial gradings
# ---------------------------------------------------------------------------

def zz_grading(shape: ShapeDescriptor, field: FieldDescriptor | None = None) -> MonomialGrading:
    """Z^2-grading by deg_zz (its support spans an index-3 sublattice)."""
    field = field or make_field(5, 1)
    return MonomialGrading(shape, field, Z2, [Z2.element(deg_zz(b)) for b in canonical_basis(shape)])


def canonical_grading(shape: ShapeDescriptor, field: FieldDescriptor | None = None) -> MonomialGrading:
    field = field or make_field(5, 1)
    G = Z(1)
    return MonomialGrading(shape, field, G, [G.element([deg_canonical(b)]) for b in canonical_basis(shape)])


def standard_grading(phi: GroupHom, shape: ShapeDescriptor, field: FieldDescriptor | None = None) -> MonomialGrading:
    """Label each basis vector b by phi(deg_standard(b))."""
    if phi.domain != Z2:
        raise ValueError("a standard grading is induced by a homomorphism from Z^2")
    field = field or make_field(5, 1)
    return MonomialGrading(
        shape, field, phi.codomain, [phi(Z2.element(deg_standard(b))) for b in canonical_basis(shape)]
    )


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def _reduce_labels(arr: np.ndarray, group: AbelianGroup) -> np.ndarray:
    arr = arr.copy()
    for j, m in enumerate(group.torsion):
        arr[:, group.rank + j] %= m
    return arr


def _verify_monomial(G: MonomialGrading) -> Verdict:
    table = structure_table(G.shape)
    lab = G.label_array()
    lhs = _reduce_labels(lab[table.I] + lab[table.J], G.group)
    bad = np.flatnonzero((lhs != lab[table.M]).any(axis=1))
    if not bad.size:
        return Verdict(True)
    t = bad[0]
    i, j, m = int(table.I[t]), int(table.J[t]), int(table.M[t])
    basis = canonical_basis(G.shape)
    return Verdict(False, {
        "g1": G.degrees[i], "g2": G.degrees[j], "expected": G.degrees[i] + G.degrees[j],
        "u": repr(basis[i]), "v": repr(basis[j]),
        "offending_term": repr(basis[m]), "offending_label": G.degrees[m],
        "coefficient": int(table.V[t]),
    })


def verify_grading(G: Grading) -> Verdict:
    """Check [G_g, G_h] in G_{g+h} for all component pairs by exact row reduction."""
    if isinstance(G, MonomialGrading):
        return _verify_monomial(G)
    table = structure_table(G.shape)
    F = G.field
    comps = G.components
    for a, (g1, B1) in enumerate(comps):
        for g2, B2 in comps[a:]:
            br = table.pairwise_brackets(B1, B2)
            vecs = FMatrix(F, br.reshape(-1, G.dim, F.k))
            res = G.residue(g1 + g2, vecs)
            nz = np.flatnonzero(res.nonzero_mask().any(axis=1))
            if nz.size:
                x, y = divmod(int(nz[0]), B2.shape[0])
                return Verdict(False, {
                    "g1": g1, "g2": g2, "expected": g1 + g2,
                    "u": B1.row(x), "v": B2.row(y), "bracket": vecs.row(int(nz[0])),
                    "target_present": G.component(g1 + g2) is not None,
                })
    return Verdict(True)


# ---------------------------------------------------------------------------
# coarsening, support, comparison
# ---------------------------------------------------------------------------

def support(G: Grading) -> list[GroupElement]:
    return [g for g, B in G.components if B.shape[0]]


def coarsen(G: Grading, phi: GroupHom) -> Grading:
    """Merge components along the fibres of phi."""
    if phi.domain != G.group:
        raise ValueError(f"homomorphism domain {phi.domain} differs from the grading group {G.group}")
    if isinstance(G, MonomialGrading):
        return MonomialGrading(G.shape, G.field, phi.codomain, [phi(g) for g in G.degrees])
    merged: dict[GroupElement, list[FMatrix]] = defaultdict(list)
    for g, B in G.components:
        merged[phi(g)].append(B)
    comps = [(h, FMatrix.vstack(G.field, Bs, G.dim)) for h, Bs in merged.items()]
    return Grading(G.shape, G.field, phi.codomain, comps, check=False)


def same_grading(A: Grading, B: Grading) -> bool:
    """Equal groups, equal labels and equal subspaces label by label."""
    if A.group != B.group or A.field != B.field or set(A.labels) != set(B.labels):
        return False
    for g, basis in A.components:
        if A._rref[g][0] != B._rref[g][0]:
            return False
    return True


def find_relabeling(A: Grading, B: Grading) -> dict[GroupElement, GroupElement] | None:
    """Map theta on labels with A_g = B_theta(g) as subspaces, if one exists."""
    if A.field != B.field:
        return None
    by_space = {}
    for h, _ in B.components:
        R = B._rref[h][0]
        by_space[(R.data.tobytes(), R.shape)] = h
    out = {}
    for g, _ in A.components:
        R = A._rref[g][0]
        h = by_space.get((R.data.tobytes(), R.shape))
        if h is None:
            return None
        out[g] = h
    return out


# ---------------------------------------------------------------------------
# refinement -> homomorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RecoveredHom:
    """The coarsening map, known on the subgroup generated by the fine support."""

    subgroup: Subgroup
    on_subgroup: GroupHom  # subgroup.group -> coarse group
    on_group: GroupHom | None  # defined when the support generates the fine group
    label_map: dict[GroupElement, GroupElement]
    onto: bool

    def __call__(self, g: GroupElement) -> GroupElement:
        c = self.subgroup.coordinates(g)
        if c is None:
            raise ValueError(f"{g} is outside the subgroup generated by the support")
        return self.on_subgroup(c)

    def agrees_with(self, phi: GroupHom) -> bool:
        """Does phi restrict to the recovered map on <Supp>?"""
        return all(phi(self.subgroup.inclusion(k)) == self.on_subgroup(k) for k in self.subgroup.group.generators())


def _containing_label(fine_basis: FMatrix, coarse: Grading) -> GroupElement | None:
    for h, _ in coarse.components:
        if coarse.residue(h, fine_basis).is_zero():
            return h
    return None


def recover_homomorphism(fine: Grading, coarse: Grading) -> RecoveredHom:
    """Find phi with coarse = coarsen(fine, phi) on the subgroup generated by Supp fine.

    Raises NotARefinement with a witness when some fine component is not
    contained in a coarse one, or when the induced label map is not the
    restriction of a homomorphism.
    """
    if fine.shape != coarse.shape:
        raise ValueError("gradings of different algebras")
    label_map: dict[GroupElement, GroupElement] = {}
    if isinstance(fine, MonomialGrading) and isinstance(coarse, MonomialGrading):
        for g, idx in fine.index_sets.items():
            hs = {coarse.degrees[i] for i in idx}
            if len(hs) != 1:
                raise NotARefinement(
                    f"component {g} meets several coarse components",
                    {"fine_label": g, "coarse_labels": sorted(hs, key=lambda e: e.coords)},
                )
            label_map[g] = hs.pop()
    else:
        for g, B in fine.components:
            h = _containing_label(B, coarse)
            if h is None:
                raise NotARefinement(f"component {g} is not inside any coarse component", {"fine_label": g})
            label_map[g] = h

    G, H = fine.group, coarse.group
    supp = list(label_map)
    K = subgroup_generated(supp, G)
    relations = [[m * int(i == G.rank + j) for i in range(G.ngens)] for j, m in enumerate(G.torsion)]
    rows = [list(s.coords) for s in supp] + relations
    images = []
    for k_gen in K.group.generators():
        c = solve_rows(rows, K.inclusion(k_gen).coords)
        acc = H.identity
        for ci, s in zip(c, supp):
            if ci:
                acc = acc + label_map[s] * ci
        images.append(acc)
    try:
        psi = GroupHom(K.group, H, tuple(images))
    except ValueError as exc:
        raise NotARefinement("labels do not come from a homomorphism", {"reason": str(exc)}) from exc
    for s in supp:
        got = psi(K.coordinates(s))
        if got != label_map[s]:
            raise NotARefinement(
                "labels do not come from a homomorphism",
                {"fine_label": s, "coarse_label": label_map[s], "homomorphism_value": got},
            )
    on_group = None
    if K.index == 1:
        on_group = GroupHom(G, H, tuple(psi(K.coordinates(e)) for e in G.generators()))
    onto = subgroup_generated(list(psi.images), H).index == 1 if psi.images else H.ngens == 0
    return RecoveredHom(K, psi, on_group, label_map, onto)


# ---------------------------------------------------------------------------
# twisting by an automorphism
# ---------------------------------------------------------------------------

def apply_automorphism(G: Grading, psi) -> Grading:
    """The grading with components psi(G_g), labels unchanged."""
    M = psi.matrix if hasattr(psi, "matrix") else psi
    if M.field != G.field:
        raise ValueError("automorphism and grading over different fields")
    if not M.is_invertible():
        raise ValueError("cannot twist by a singular map")
    comps = [(g, B @ M.T) for g, B in G.components]
    return Grading(G.shape, G.field, G.group, comps, check=False)
