import json

import numpy as np
import pytest

from melikyan.abelian import AbelianGroup, GroupHom, Z2, cyclic
from melikyan.automorphism import TorusParameter, exp_ad, torus_points
from melikyan.divided_power import DividedPowerPoly
from melikyan.finite_field import make_field
from melikyan.grading import Grading, same_grading, standard_grading, zz_grading
from melikyan.melikyan import BasisIndex, basis_element, melikyan_shape
from melikyan.serialize import (
    dumps,
    element_from_json,
    element_to_json,
    endomorphism_from_json,
    endomorphism_to_json,
    field_from_json,
    field_to_json,
    grading_from_json,
    grading_to_json,
    group_from_json,
    group_to_json,
    hom_from_json,
    hom_to_json,
    poly_from_json,
    poly_to_json,
    torus_parameter_from_json,
    torus_parameter_to_json,
)

F25 = make_field(5, 2)
S = melikyan_shape(1, 1)


def roundtrip(doc):
    return json.loads(dumps(doc))


def test_field_and_elements():
    assert field_from_json(roundtrip(field_to_json(F25))) == F25
    for x in list(F25.elements())[::3]:
        assert element_from_json(roundtrip(element_to_json(x))) == x
    with pytest.raises(ValueError):
        field_from_json({"p": 5, "k": 2, "modulus": [3, 0, 1]})


def test_groups_and_homs():
    for G in (Z2, cyclic(6), AbelianGroup(1, (2, 4))):
        assert group_from_json(roundtrip(group_to_json(G))) == G
    phi = GroupHom.from_matrix(Z2, AbelianGroup(1, (2,)), [[1, 1], [-2, 0]])
    back = hom_from_json(roundtrip(hom_to_json(phi)))
    assert back.images == phi.images and back.domain == phi.domain
    spec = hom_from_json({"codomain": {"torsion": [3]}, "images": [[1], [2]]})
    assert spec.domain == Z2
    with pytest.raises(ValueError):
        hom_from_json({"codomain": {"torsion": [3]}, "images": [[1]]})
    with pytest.raises(ValueError):
        hom_from_json({"schema": "other/1", "codomain": {}, "images": []})


def test_polys():
    f = DividedPowerPoly(S, F25, {(1, 2): F25.element(3), (0, 0): F25.one})
    assert poly_from_json(roundtrip(poly_to_json(f)), S, F25) == f


def test_gradings():
    G = standard_grading(GroupHom.from_matrix(Z2, cyclic(3), [[1], [2]]), S, F25)
    assert same_grading(grading_from_json(roundtrip(grading_to_json(G))), G)
    dense = Grading(S, F25, G.group, G.components)
    assert same_grading(grading_from_json(roundtrip(grading_to_json(dense, compact=False))), G)
    zz = zz_grading(S)
    assert same_grading(grading_from_json(roundtrip(grading_to_json(zz))), zz)


def test_endomorphism_and_torus():
    y = basis_element(S, F25, BasisIndex("T2", (4, 4)), F25.element(2))
    psi = exp_ad(y)
    doc = roundtrip(endomorphism_to_json(psi))
    assert doc["flags"]["invertible"] and doc["flags"]["bracket_preserving"]
    assert endomorphism_from_json(doc) == psi
    t = torus_points(F25)[55]
    back = torus_parameter_from_json(roundtrip(torus_parameter_to_json(t)))
    assert (back.t1, back.t2) == (t.t1, t.t2)


def test_dumps_is_deterministic():
    doc = {"b": [1, 2], "a": {"z": 1, "y": np.int64(3)}}
    assert dumps(doc) == dumps(dict(reversed(list(doc.items()))))
