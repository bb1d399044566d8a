"""JSON encodings.  Every top-level document carries a versioned ``schema`` key."""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .abelian import AbelianGroup, GroupElement, GroupHom, Z2
from .divided_power import DividedPowerPoly, ShapeDescriptor
from .finite_field import FieldDescriptor, FieldElement, make_field
from .grading import Grading, MonomialGrading
from .linalg import FMatrix
from .melikyan import melikyan_shape
from .witt import TildeField, VectorField

SCHEMA_VERSION = 1


def _schema(kind: str) -> str:
    return f"melikyan.{kind}/{SCHEMA_VERSION}"


def _check_schema(doc: dict, kind: str):
    got = doc.get("schema")
    if got is not None and got != _schema(kind):
        raise ValueError(f"expected schema {_schema(kind)!r}, got {got!r}")


# -- fields -----------------------------------------------------------------

def field_to_json(F: FieldDescriptor) -> dict:
    return {"p": F.p, "k": F.k, "modulus": list(F.modulus)}


def field_from_json(doc: dict) -> FieldDescriptor:
    F = make_field(int(doc["p"]), int(doc.get("k", 1)))
    if "modulus" in doc and tuple(doc["modulus"]) != tuple(F.modulus):
        raise ValueError(f"unsupported modulus {doc['modulus']}; this tool uses {list(F.modulus)}")
    return F


def element_to_json(x: FieldElement) -> dict:
    return {"schema": _schema("field-element"), "p": x.field.p, "k": x.field.k, "coords": list(x.coords)}


def element_from_json(doc: dict, F: FieldDescriptor | None = None) -> FieldElement:
    _check_schema(doc, "field-element")
    F = F or make_field(int(doc["p"]), int(doc.get("k", 1)))
    if (doc["p"], doc.get("k", 1)) != (F.p, F.k):
        raise ValueError("element belongs to another field")
    return FieldElement(F, tuple(int(c) % F.p for c in doc["coords"]))


def _coeff(x) -> Any:
    """Compact scalar: an int in a prime field, a coordinate list otherwise."""
    return int(x.coords[0]) if x.field.k == 1 else list(x.coords)


def _coeff_from(F: FieldDescriptor, v) -> FieldElement:
    if isinstance(v, int):
        return F.element(v)
    return FieldElement(F, tuple(int(c) % F.p for c in v))


# -- O and W ----------------------------------------------------------------

def poly_to_json(f: DividedPowerPoly) -> list[dict]:
    return [{"a": list(a), "coeff": _coeff(c)} for a, c in sorted(f.terms.items())]


def poly_from_json(doc: list[dict], shape: ShapeDescriptor, F: FieldDescriptor) -> DividedPowerPoly:
    return DividedPowerPoly(shape, F, {tuple(t["a"]): _coeff_from(F, t["coeff"]) for t in doc})


def field_vector_to_json(D: VectorField | TildeField) -> dict:
    return {"kind": "W" if isinstance(D, VectorField) else "Wtilde",
            "components": [poly_to_json(c) for c in D.components]}


def field_vector_from_json(doc: dict, shape: ShapeDescriptor, F: FieldDescriptor):
    cls = {"W": VectorField, "Wtilde": TildeField}[doc["kind"]]
    return cls(shape, F, [poly_from_json(c, shape, F) for c in doc["components"]])


# -- algebra ----------------------------------------------------------------

def algebra_to_json(shape: ShapeDescriptor) -> dict:
    return {"algebra": "melikyan", "p": shape.p, "n": list(shape.n), "dim": 5 * shape.dim}


def algebra_from_json(doc: dict) -> ShapeDescriptor:
    if doc.get("algebra", "melikyan") != "melikyan" or int(doc.get("p", 5)) != 5:
        raise ValueError("only Melikyan algebras in characteristic 5 are supported")
    n = doc["n"]
    if len(n) != 2:
        raise ValueError("n must have two entries")
    return melikyan_shape(int(n[0]), int(n[1]))


# -- groups -----------------------------------------------------------------

def group_to_json(G: AbelianGroup) -> dict:
    return {"schema": _schema("abelian-group"), "rank": G.rank, "torsion": list(G.torsion)}


def group_from_json(doc: dict) -> AbelianGroup:
    _check_schema(doc, "abelian-group")
    return AbelianGroup(int(doc.get("rank", 0)), tuple(int(m) for m in doc.get("torsion", ())))


def group_element_to_json(g: GroupElement) -> dict:
    return {"free": list(g.free), "torsion": list(g.torsion)}


def group_element_from_json(doc, G: AbelianGroup) -> GroupElement:
    if isinstance(doc, list):
        return G.element(doc)
    return G.element(list(doc.get("free", [])) + list(doc.get("torsion", [])))


def hom_to_json(phi: GroupHom) -> dict:
    return {"schema": _schema("group-hom"), "domain": group_to_json(phi.domain),
            "codomain": group_to_json(phi.codomain), "images": [list(g.coords) for g in phi.images]}


def hom_from_json(doc: dict) -> GroupHom:
    """Also accepts a hom-spec: domain omitted (Z^2) and images as coordinate lists."""
    if doc.get("schema") not in (None, _schema("group-hom"), _schema("hom-spec")):
        raise ValueError(f"unexpected schema {doc.get('schema')!r}")
    if "codomain" not in doc or "images" not in doc:
        raise ValueError("a homomorphism needs 'codomain' and 'images'")
    dom = group_from_json(doc["domain"]) if "domain" in doc else Z2
    cod = group_from_json(doc["codomain"])
    images = doc["images"]
    if len(images) != dom.ngens:
        raise ValueError(f"{dom} has {dom.ngens} generators but {len(images)} images were given")
    return GroupHom(dom, cod, tuple(group_element_from_json(v, cod) for v in images))


# -- matrices and gradings --------------------------------------------------

def _rows_to_json(B: FMatrix) -> list[list]:
    if B.field.k == 1:
        return B.data[..., 0].tolist()
    return B.data.tolist()


def _rows_from_json(rows, F: FieldDescriptor, dim: int) -> FMatrix:
    arr = np.array(rows, dtype=np.int64) % F.p
    if arr.size == 0:
        return FMatrix.zeros(F, 0, dim)
    if arr.ndim == 2:
        arr = arr[..., None]
    if arr.shape[1:] != (dim, F.k):
        raise ValueError(f"basis rows have shape {arr.shape[1:]}, expected {(dim, F.k)}")
    return FMatrix(F, arr)


def grading_to_json(G: Grading, compact: bool = True) -> dict:
    doc = {"schema": _schema("grading"), "field": field_to_json(G.field),
           "algebra": algebra_to_json(G.shape), "group": group_to_json(G.group)}
    if compact and isinstance(G, MonomialGrading):
        doc["degrees"] = [list(g.coords) for g in G.degrees]
    else:
        doc["components"] = [{"label": list(g.coords), "basis": _rows_to_json(B)} for g, B in G.components]
    return doc


def grading_from_json(doc: dict) -> Grading:
    _check_schema(doc, "grading")
    F = field_from_json(doc["field"])
    shape = algebra_from_json(doc["algebra"])
    group = group_from_json(doc["group"])
    if "degrees" in doc:
        return MonomialGrading(shape, F, group, [group.element(c) for c in doc["degrees"]])
    dim = 5 * shape.dim
    comps = [(group.element(c["label"]), _rows_from_json(c["basis"], F, dim)) for c in doc["components"]]
    return Grading(shape, F, group, comps)


def endomorphism_to_json(psi, include_flags: bool = True) -> dict:
    A = psi.matrix
    nz = np.argwhere(A.nonzero_mask())
    entries = [[int(i), int(j), _coeff(A.entry(int(i), int(j)))] for i, j in nz]
    doc = {"schema": _schema("endomorphism"), "field": field_to_json(A.field),
           "algebra": algebra_to_json(psi.shape), "space": psi.algebra,
           "size": A.shape[0], "entries": entries}
    if include_flags:
        doc["flags"] = psi.flags()
    return doc


def endomorphism_from_json(doc: dict):
    from .automorphism import Endomorphism

    _check_schema(doc, "endomorphism")
    F = field_from_json(doc["field"])
    shape = algebra_from_json(doc["algebra"])
    n = int(doc["size"])
    data = np.zeros((n, n, F.k), dtype=np.int64)
    for i, j, c in doc["entries"]:
        data[i, j] = _coeff_from(F, c).coords
    return Endomorphism(shape, FMatrix(F, data), doc.get("space", "M"))


def torus_parameter_to_json(t) -> dict:
    return {"schema": _schema("torus-parameter"), "t1": element_to_json(t.t1), "t2": element_to_json(t.t2)}


def torus_parameter_from_json(doc: dict):
    from .automorphism import TorusParameter

    _check_schema(doc, "torus-parameter")
    return TorusParameter(element_from_json(doc["t1"]), element_from_json(doc["t2"]))


def dumps(doc: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_default)


def _default(obj):
    if isinstance(obj, GroupElement):
        return list(obj.coords)
    if isinstance(obj, FieldElement):
        return _coeff(obj)
    if isinstance(obj, FMatrix):
        return _rows_to_json(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return repr(obj)
