"""Verification batteries shared by the command line and the test-suite.

Each battery returns a list of :class:`Check` records.  A check carries a
short mathematical statement (``anchor``) describing what was verified.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import automorphism as aut
from .abelian import (
    AbelianGroup,
    GroupHom,
    Z,
    Z2,
    augmentation,
    character_group,
    cyclic,
    generator_characters,
    pullback_character,
    subgroup_generated,
)
from .divided_power import ShapeDescriptor
from .finite_field import CharacteristicError, FieldDescriptor, extend_degree, make_field
from .grading import (
    MonomialGrading,
    apply_automorphism,
    canonical_grading,
    coarsen,
    find_relabeling,
    recover_homomorphism,
    same_grading,
    standard_grading,
    support,
    verify_grading,
    zz_grading,
)
from .linalg import FMatrix
from .melikyan import (
    BasisIndex,
    MelikyanElement,
    all_triples,
    antisymmetry_failures,
    basis_element,
    canonical_basis,
    deg_canonical,
    ideal_dimension,
    jacobi_failures,
    structure_table,
)


class UsageError(ValueError):
    """Invalid request (maps to exit status 2)."""


@dataclass
class Check:
    name: str
    anchor: str
    ok: bool
    witness: Any = None
    detail: Any = None
    wall_time: float = 0.0

    def to_json(self) -> dict:
        doc = {"name": self.name, "anchor": self.anchor, "verdict": "pass" if self.ok else "fail",
               "wall_time": round(self.wall_time, 3)}
        if not self.ok:
            doc["witness"] = self.witness
        if self.detail is not None:
            doc["detail"] = self.detail
        return doc


def run_check(name: str, anchor: str, fn: Callable[[], Any]) -> Check:
    """fn returns ok, (ok, witness) or (ok, witness, detail); exceptions are failures."""
    t0 = time.perf_counter()
    witness = detail = None
    try:
        res = fn()
        if isinstance(res, tuple):
            ok, witness, *rest = res
            detail = rest[0] if rest else None
        else:
            ok = bool(res)
    except UsageError:
        raise
    except Exception as exc:  # a crash inside a check is a failed check
        ok, witness = False, {"error": f"{type(exc).__name__}: {exc}"}
    if not ok and not witness:
        witness = {"reason": f"{name} returned false"}
    return Check(name, anchor, bool(ok), witness if not ok else None, detail, time.perf_counter() - t0)


def _first(items, limit=5):
    return [list(x) if isinstance(x, tuple) else x for x in items[:limit]]


# ---------------------------------------------------------------------------
# bracket
# ---------------------------------------------------------------------------

def jacobi_suite(shape: ShapeDescriptor, seed: int = 0, samples: int = 10**6, exhaustive_limit: int = 125) -> list[Check]:
    table = structure_table(shape)
    d = table.dim
    checks = [run_check(
        "anticommutativity", "[x, y] = -[y, x] and [x, x] = 0 on all basis pairs",
        lambda: (not (bad := antisymmetry_failures(table)), {"pairs": _first(bad)}, {"pairs_checked": d * d}),
    )]

    def jac():
        if d <= exhaustive_limit:
            bad, n = [], 0
            for block in all_triples(d):
                bad.extend(jacobi_failures(table, block))
                n += len(block)
            mode = "exhaustive"
        else:
            rng = np.random.default_rng(seed)
            triples = rng.integers(0, d, size=(samples, 3))
            bad, n, mode = jacobi_failures(table, triples), samples, "random"
        return not bad, {"triples": _first(bad)}, {"triples_checked": n, "mode": mode}

    checks.append(run_check("jacobi", "[x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0", jac))
    return checks


# ---------------------------------------------------------------------------
# gradings
# ---------------------------------------------------------------------------

def _swapped_zz(shape: ShapeDescriptor) -> MonomialGrading:
    zz = zz_grading(shape)
    a, b = Z2.element((-3, 0)), Z2.element((-1, -1))
    degs = [b if g == a else a if g == b else g for g in zz.degrees]
    return MonomialGrading(shape, zz.field, Z2, degs)


def grading_suite(shape: ShapeDescriptor, seed: int = 0) -> list[Check]:
    zz, can = zz_grading(shape), canonical_grading(shape)
    std = standard_grading(GroupHom.identity(Z2), shape)
    basis = canonical_basis(shape)
    out = []
    for name, G in (("zz_grading", zz), ("standard_grading", std), ("canonical_grading", can)):
        out.append(run_check(f"{name} verifies", "[M_g, M_h] lies in M_{g+h}",
                             lambda G=G: ((v := verify_grading(G)).ok, v.witness, {"components": len(G.components)})))

    def coarsening_identity():
        c = coarsen(zz, augmentation(2))
        bad = [repr(b) for b, x, y in zip(basis, c.degrees, can.degrees) if x != y]
        return not bad, {"basis_vectors": bad[:5]}

    out.append(run_check("coarsening identity", "M_i is the sum of M_(a1,a2) over a1 + a2 = i", coarsening_identity))

    def canonical_from_standard():
        phi = GroupHom.from_matrix(Z2, Z(1), [[3], [2]])
        g = standard_grading(phi, shape)
        bad = [repr(b) for b, x in zip(basis, g.degrees) if x.coords[0] != deg_canonical(b)]
        return not bad, {"basis_vectors": bad[:5]}

    out.append(run_check("canonical degree from standard degree", "deg = 3i + 2j for standard degree (i, j)",
                         canonical_from_standard))
    out.append(run_check(
        "support of zz grading", "Supp generates a subgroup of index 3 in Z^2",
        lambda: ((ix := subgroup_generated(support(zz)).index) == 3, {"index": ix}, {"index": ix})))
    out.append(run_check(
        "support of standard grading", "Supp generates Z^2",
        lambda: ((ix := subgroup_generated(support(std)).index) == 1, {"index": ix}, {"index": ix})))

    def recover_aug():
        r = recover_homomorphism(zz, can)
        return r.agrees_with(augmentation(2)), {"recovered": [list(g.coords) for g in r.on_subgroup.images]}

    out.append(run_check("refinement homomorphism", "the labelling map of a refinement is a homomorphism", recover_aug))

    def z4():
        phi = GroupHom.from_matrix(Z2, cyclic(4), [[1], [2]])
        v = verify_grading(standard_grading(phi, shape))
        return v.ok, v.witness

    out.append(run_check("Z/4 standard grading", "coarsenings of gradings are gradings", z4))

    def negative():
        v = verify_grading(_swapped_zz(shape))
        return (not v.ok and bool(v.witness)), {"reason": "swapped labels were accepted"}, {"witness": v.witness}

    out.append(run_check("swapped labels rejected", "a relabelled decomposition is not a grading", negative))
    return out


# ---------------------------------------------------------------------------
# torus
# ---------------------------------------------------------------------------

def torus_suite(shape: ShapeDescriptor, F: FieldDescriptor, seed: int = 0, pairs: int = 10**4, lifts: int = 100) -> list[Check]:
    if (F.order - 1) % 3:
        raise UsageError(f"the torus battery needs cube roots of unity; GF({F.order}) has none (use an even field degree)")
    rng = np.random.default_rng(seed)
    pts = aut.torus_points(F)
    out = []

    def multiplicative():
        idx = rng.integers(0, len(pts), size=(pairs, 2))
        diag = {}

        def dg(i):
            if i not in diag:
                diag[i] = aut.lambda_diagonal(pts[i], shape)
            return diag[i]

        for a, b in idx:
            st = pts[a] * pts[b]
            if not (F.mul_arrays(dg(a), dg(b)) == aut.lambda_diagonal(st, shape)).all():
                return False, {"s": repr(pts[a]), "t": repr(pts[b])}
        # full matrix products on a few pairs as a cross-check of the diagonal shortcut
        for a, b in idx[:5]:
            if not aut.lambda_(pts[a], shape).matrix @ aut.lambda_(pts[b], shape).matrix == aut.lambda_(pts[a] * pts[b], shape).matrix:
                return False, {"s": repr(pts[a]), "t": repr(pts[b]), "reason": "matrix product"}
        return True, None, {"pairs": pairs}

    out.append(run_check("lambda multiplicative", "lambda(st) = lambda(s) lambda(t)", multiplicative))

    def all_automorphisms():
        for t in pts:
            v = aut.lambda_(t, shape).bracket_check
            if not v.ok:
                return False, {"t": repr(t), **v.witness}
        return True, None, {"parameters": len(pts)}

    out.append(run_check("lambda(t) automorphisms", "every lambda(t) preserves the bracket", all_automorphisms))

    def kernel():
        ker = aut.kernel_of_lambda(F)
        ident = all(aut.lambda_(t, shape).is_identity() for t in ker)
        # independent enumeration: parameters whose diagonal is all ones
        one = np.zeros(F.k, dtype=np.int64)
        one[0] = 1
        brute = [t for t in pts if (aut.lambda_diagonal(t, shape) == one).all()]
        ok = len(ker) == 3 and ident and {repr(t) for t in brute} == {repr(t) for t in ker}
        return ok, {"kernel": [repr(t) for t in ker], "brute_force": [repr(t) for t in brute]}

    out.append(run_check("kernel of lambda", "ker lambda = {(t, 1/t) : t^3 = 1}", kernel))

    def theta_checks():
        th = aut.theta(shape, F)
        b2 = aut.beta(F) ** 2
        if not th.power(3).is_identity():
            return False, {"reason": "Theta^3 != Id"}
        if not aut.pi_restrict(th).is_identity():
            return False, {"reason": "pi(Theta) != Id_W"}
        for i, b in enumerate(canonical_basis(shape)):
            if th.matrix.entry(i, i) != b2 ** deg_canonical(b):
                return False, {"basis_vector": repr(b), "degree": deg_canonical(b)}
        return th.bracket_preserving, {"reason": "Theta is not an automorphism"}

    out.append(run_check("Theta", "Theta^3 = Id, pi(Theta) = Id_W, Theta = (beta^2)^i on M_i", theta_checks))

    def restriction():
        big, emb = extend_degree(F, 3)
        for _ in range(lifts):
            s1, s2 = pts[int(rng.integers(len(pts)))].t1, pts[int(rng.integers(len(pts)))].t2
            t1, t2 = aut.cube_root(emb(s1)), aut.cube_root(emb(s2))
            if t1 is None or t2 is None:
                return False, {"s": [repr(s1), repr(s2)], "reason": "no cube root"}
            w = aut.pi_restrict(aut.lambda_(aut.TorusParameter(t1, t2), shape))
            direct = _tw_matrix(shape, emb(s1), emb(s2))
            if not w.matrix == direct:
                return False, {"s": [repr(s1), repr(s2)]}
        return True, None, {"lifts": lifts, "extension": f"GF({big.order})"}

    out.append(run_check("restriction onto T_W", "pi maps the torus of M onto the torus of W", restriction))

    def membership():
        for t in [pts[int(i)] for i in rng.integers(0, len(pts), size=20)]:
            v = aut.in_torus(aut.lambda_(t, shape))
            if not v.ok:
                return False, {"t": repr(t), **(v.obstruction or {})}
            lam = aut.lambda_(v.parameter, shape)
            ref = aut.lambda_(t, shape)
            if v.embedding is not None:
                ref = ref.embed(v.embedding)
            if not lam.matrix == ref.matrix:
                return False, {"t": repr(t), "recovered": repr(v.parameter)}
        return aut.in_torus(aut.theta(shape, F)).ok, {"reason": "Theta not recognised"}

    out.append(run_check("torus membership", "lambda(t) and Theta lie in T_M", membership))
    return out


def _tw_matrix(shape: ShapeDescriptor, s1, s2) -> FMatrix:
    """x^(a) d_k -> s1^a1 s2^a2 / s_k x^(a) d_k on W(2; n)."""
    F = s1.field
    entries = []
    for k, sk in ((1, s1), (2, s2)):
        for a in shape.basis:
            entries.append(s1 ** a[0] * s2 ** a[1] / sk)
    return FMatrix.diagonal(F, entries)


# ---------------------------------------------------------------------------
# swaps
# ---------------------------------------------------------------------------

def sigma_suite(shape: ShapeDescriptor, F: FieldDescriptor, seed: int = 0, samples: int = 100) -> list[Check]:
    if shape.n[0] != shape.n[1]:
        raise UsageError(f"sigma needs n1 = n2 (got n = {shape.n}); for n1 != n2 the torus of W is self-normalizing")
    rng = np.random.default_rng(seed)
    out = []
    out.append(run_check("upsilon automorphism of O", "x^(a1,a2) -> x^(a2,a1) is multiplicative",
                         lambda: ((u := aut.upsilon(shape, F)).bracket_check.ok, u.bracket_check.witness)))

    def sig():
        s = aut.sigma_w(shape, F)
        return s.is_automorphism and (s @ s).is_identity(), s.bracket_check.witness

    out.append(run_check("sigma automorphism of W", "sigma preserves the Witt bracket and squares to Id", sig))
    out.append(run_check("sigma_M constants", "the compatibility equations have the unique solution (-1, -1)",
                         lambda: ((c := aut.solve_sigma_constants(shape)) == [(-1, -1)], {"solutions": c}, {"solutions": c})))

    def sm():
        s = aut.sigma_m(shape, F)
        ok = s.is_automorphism and aut.pi_restrict(s) == aut.sigma_w(shape, F) and (s @ s).is_identity()
        return ok, {"flags": s.flags()}

    out.append(run_check("sigma_M", "sigma_M is an automorphism extending sigma with sigma_M^2 = Id", sm))

    def conj():
        s = aut.sigma_m(shape, F)
        pts = aut.torus_points(F)
        s_inv = s.matrix.inverse()
        for i in rng.integers(0, len(pts), size=samples):
            t = pts[int(i)]
            lhs = s.matrix @ aut.lambda_(t, shape).matrix @ s_inv
            if not lhs == aut.lambda_(t.swapped(), shape).matrix:
                return False, {"t": repr(t)}
        return True, None, {"samples": samples}

    out.append(run_check("sigma_M conjugation", "sigma_M lambda(t1,t2) sigma_M^-1 = lambda(t2,t1)", conj))

    def extensions():
        s = aut.sigma_m(shape, F)
        sols = aut.diagonal_automorphisms(shape)
        th = aut.theta(shape, F)
        powers = [th.power(l) for l in range(3)]
        diags = [aut.diagonal_from_exponents(shape, F, e) for e in sols]
        ok = len(diags) == 3 and all(any(D == P for P in powers) for D in diags)
        ok = ok and all(D.is_automorphism for D in diags)
        exts = [s @ D for D in diags]
        ok = ok and all(E.is_automorphism and aut.pi_restrict(E) == aut.sigma_w(shape, F) for E in exts)
        return ok, {"solutions": len(sols)}, {"diagonal_solutions": len(sols)}

    out.append(run_check("extensions of sigma", "the extensions of sigma are sigma_M Theta^l, l = 0, 1, 2", extensions))
    return out


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

DUALITY_GROUPS = {
    "Z/2": AbelianGroup(0, (2,)),
    "Z/3": AbelianGroup(0, (3,)),
    "Z/4": AbelianGroup(0, (4,)),
    "Z/6": AbelianGroup(0, (6,)),
    "Z/2xZ/2": AbelianGroup(0, (2, 2)),
}


def random_hom(G: AbelianGroup, rng: np.random.Generator, domain: AbelianGroup = Z2) -> GroupHom:
    images = []
    for _ in range(domain.ngens):
        free = [int(v) for v in rng.integers(-3, 4, size=G.rank)]
        tors = [int(rng.integers(0, m)) for m in G.torsion]
        images.append(G.element(free + tors))
    return GroupHom(domain, G, tuple(images))


def duality_suite(shape: ShapeDescriptor, F: FieldDescriptor, seed: int = 0, per_group: int = 5) -> list[Check]:
    rng = np.random.default_rng(seed)
    std = standard_grading(GroupHom.identity(Z2), shape, F)
    out = []
    for name, G in DUALITY_GROUPS.items():
        phis = [random_hom(G, rng) for _ in range(per_group)]

        def round_trip(G=G, phis=phis):
            for phi in phis:
                Gm = standard_grading(phi, shape, F)
                Q = [aut.eta(Gm, chi) for chi in generator_characters(G, F)]
                R = aut.eigenspace_grading(Q, G)
                if not same_grading(R, Gm):
                    return False, {"phi": [list(g.coords) for g in phi.images]}
            return True

        out.append(run_check(f"eta round trip {name}", "eigenspaces of the dual action recover the grading", round_trip))

        def lz(G=G, phis=phis):
            for phi in phis:
                coarse = coarsen(std, phi)
                for chi in character_group(G, F):
                    if not aut.eta(coarse, chi) == aut.eta(std, pullback_character(chi, phi)):
                        return False, {"phi": [list(g.coords) for g in phi.images], "chi": [repr(v) for v in chi.values]}
            return True

        out.append(run_check(f"pullback identity {name}", "eta of the coarsening at chi = eta at chi o phi", lz))

    def z5():
        try:
            generator_characters(cyclic(5), F)
        except CharacteristicError as exc:
            return True, None, {"error": str(exc)}
        return False, {"reason": "Z/5 characters were produced"}

    out.append(run_check("Z/5 rejected", "groups with elements of order 5 have no separating characters", z5))
    return out


# ---------------------------------------------------------------------------
# simplicity
# ---------------------------------------------------------------------------

def simplicity_suite(shape: ShapeDescriptor, seed: int = 0, starts: int | None = None) -> list[Check]:
    table = structure_table(shape)
    d = table.dim
    idx = range(d) if starts is None or starts >= d else np.random.default_rng(seed).choice(d, size=starts, replace=False)

    def probe():
        for i in idx:
            dim = ideal_dimension(table, int(i))
            if dim != d:
                return False, {"start": repr(canonical_basis(shape)[int(i)]), "ideal_dimension": dim}
        return True, None, {"starts": len(idx)}

    return [run_check("ideal closure", "the ideal generated by any basis vector is the whole algebra", probe)]


# ---------------------------------------------------------------------------
# twist and recover
# ---------------------------------------------------------------------------

TWISTS = ("identity", "lambda", "exp", "sigma", "product")


def twist_degree_threshold(shape: ShapeDescriptor) -> int:
    """Smallest d with 3d exceeding the canonical degree range, so (ad y)^3 = 0 for y in M_(>=d)."""
    degs = [deg_canonical(b) for b in canonical_basis(shape)]
    return (max(degs) - min(degs)) // 3 + 1


def random_nilpotent(shape: ShapeDescriptor, F: FieldDescriptor, rng: np.random.Generator, terms: int = 3) -> MelikyanElement:
    thr = twist_degree_threshold(shape)
    high = [b for b in canonical_basis(shape) if deg_canonical(b) >= thr]
    y = MelikyanElement.zero(shape, F)
    for i in rng.choice(len(high), size=min(terms, len(high)), replace=False):
        c = F.from_index(int(rng.integers(1, F.order)))
        y = y + basis_element(shape, F, high[int(i)], c)
    return y


def build_twist(kind: str, shape: ShapeDescriptor, F: FieldDescriptor, rng: np.random.Generator):
    pts = aut.torus_points(F)
    lam = lambda: aut.lambda_(pts[int(rng.integers(len(pts)))], shape)  # noqa: E731
    if kind == "identity":
        return aut.Endomorphism.identity(shape, F)
    if kind == "lambda":
        return lam()
    if kind == "exp":
        return aut.exp_ad(random_nilpotent(shape, F, rng))
    if kind == "sigma":
        return aut.sigma_m(shape, F)
    if kind == "product":
        psi = aut.exp_ad(random_nilpotent(shape, F, rng)) @ lam()
        if shape.n[0] == shape.n[1]:
            psi = psi @ aut.sigma_m(shape, F)
        return psi
    raise UsageError(f"unknown twist {kind!r}; choose from {', '.join(TWISTS)}")


def twist_recover(shape: ShapeDescriptor, F: FieldDescriptor, seed: int = 0, group: AbelianGroup | None = None,
                  twist: str | None = None, phi: GroupHom | None = None) -> tuple[list[Check], dict]:
    """Twist a standard grading, dualize, recover by eigenspaces and untwist."""
    rng = np.random.default_rng(seed)
    group = group if group is not None else cyclic(3)
    if not group.is_finite:
        raise UsageError("twist-recover dualizes over a finite group")
    if twist is None:
        kinds = ["lambda", "exp", "sigma", "product"] if shape.n[0] == shape.n[1] else ["lambda", "exp", "product"]
        twist = kinds[seed % len(kinds)]
    if twist == "sigma" and shape.n[0] != shape.n[1]:
        raise UsageError("the sigma twist needs n1 = n2")
    try:
        chars = generator_characters(group, F)
    except CharacteristicError as exc:
        raise UsageError(str(exc)) from exc
    phi = phi if phi is not None else random_hom(group, rng)
    base = standard_grading(phi, shape, F)
    psi = build_twist(twist, shape, F, rng)
    info: dict[str, Any] = {"twist": twist, "group": str(group), "phi": [list(g.coords) for g in phi.images]}
    checks = [run_check("twist is an automorphism", "the twist preserves the bracket and is invertible",
                        lambda: (psi.is_automorphism, psi.bracket_check.witness or {"invertible": psi.invertible}))]
    twisted = apply_automorphism(base, psi)
    checks.append(run_check("twisted grading verifies", "automorphic images of gradings are gradings",
                            lambda: ((v := verify_grading(twisted)).ok, v.witness)))
    state: dict[str, Any] = {}

    def dualize():
        Q = [aut.eta(twisted, chi) for chi in chars]
        state["Q"] = Q
        return all(q.is_automorphism for q in Q), {"reason": "an eta image is not an automorphism"}

    checks.append(run_check("dual action", "characters act on the twisted grading by automorphisms", dualize))

    def eig():
        R = aut.eigenspace_grading(state["Q"], group)
        state["R"] = R
        return same_grading(R, twisted), {"reason": "eigenspace grading differs from the twisted grading"}

    checks.append(run_check("eigenspace grading", "the eigenspace decomposition of the dual action is the grading", eig))

    def untwist():
        back = apply_automorphism(state["R"], psi.inverse())
        return same_grading(back, base), {"reason": "untwisted grading differs from the standard one"}

    checks.append(run_check("untwist", "the inverse twist returns the standard grading label by label", untwist))
    rel = find_relabeling(twisted, base)
    if rel is not None:
        info["relabeling"] = {str(list(g.coords)): list(h.coords) for g, h in rel.items()}
    return checks, info
