"""Acceptance criteria 1-11.

Each test records one ``criterion N: PASS|FAIL`` line.  The lines are
printed in the pytest terminal summary, and also when this file is run
directly with ``python3 tests/test_acceptance.py``.
"""

import json
import time

import numpy as np
import pytest

from melikyan import suites
from melikyan.abelian import AbelianGroup, GroupHom, Z, Z2, cyclic, subgroup_generated
from melikyan.automorphism import NilpotencyError, exp_ad, in_torus, sigma_m
from melikyan.cli import main
from melikyan.finite_field import make_field
from melikyan.grading import (
    MonomialGrading,
    NotARefinement,
    canonical_grading,
    coarsen,
    recover_homomorphism,
    same_grading,
    standard_grading,
    support,
    verify_grading,
    zz_grading,
)
from melikyan.melikyan import BasisIndex, basis_element, canonical_basis, deg_standard, melikyan_shape

pytestmark = pytest.mark.slow

RESULTS: list[str] = []
F25 = make_field(5, 2)
S11 = melikyan_shape(1, 1)
S21 = melikyan_shape(2, 1)


def record(number: int, title: str, ok: bool, seconds: float, limit: float | None = None, note: str = ""):
    within = limit is None or seconds <= limit
    verdict = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:.0f} s)" if limit is not None else ""
    extra = f" -- {note}" if note else ""
    RESULTS.append(f"criterion {number:>2}: {verdict}  {title}  [{seconds:.1f} s{budget}]{extra}")
    print(RESULTS[-1])
    assert ok, f"criterion {number} failed: {note}"
    assert within, f"criterion {number} exceeded {limit} s"


def failing(checks):
    return "; ".join(f"{c.name}: {c.witness}" for c in checks if not c.ok)


def test_criterion_01_bracket_axioms():
    t0 = time.perf_counter()
    small = suites.jacobi_suite(S11)
    t_small = time.perf_counter() - t0
    t1 = time.perf_counter()
    big = suites.jacobi_suite(S21, seed=0, samples=10**6)
    t_big = time.perf_counter() - t1
    modes = [c.detail for c in small + big if c.name == "jacobi"]
    ok = all(c.ok for c in small + big) and modes[0]["triples_checked"] == 125**3 and modes[1]["triples_checked"] == 10**6
    in_time = t_small <= 60 and t_big <= 120
    record(1, "anticommutativity and Jacobi: 125^3 triples at (1,1), 10^6 random at (2,1)", ok and in_time,
           t_small + t_big, note=failing(small + big) or f"(1,1) {t_small:.1f} s of 60, (2,1) {t_big:.1f} s of 120")


def test_criterion_02_gradings():
    t0 = time.perf_counter()
    checks = suites.grading_suite(S11) + suites.grading_suite(S21)
    record(2, "zz, standard and canonical gradings verify; coarsening identity", all(c.ok for c in checks),
           time.perf_counter() - t0, note=failing(checks))


def test_criterion_03_support_indices():
    t0 = time.perf_counter()
    got = []
    for S in (S11, S21):
        got.append(subgroup_generated(support(zz_grading(S))).index)
        got.append(subgroup_generated(support(standard_grading(GroupHom.identity(Z2), S))).index)
    record(3, "support indices 3 (zz) and 1 (standard)", got == [3, 1, 3, 1], time.perf_counter() - t0, note=str(got))


@pytest.fixture(scope="module")
def torus_checks():
    return {c.name: c for c in suites.torus_suite(S11, F25, seed=0, pairs=10**4, lifts=100)}


def test_criterion_04_torus(torus_checks):
    mult = torus_checks["lambda multiplicative"]
    others = [c for n, c in torus_checks.items() if n != "restriction onto T_W"]
    ok = all(c.ok for c in others) and mult.detail == {"pairs": 10**4}
    t = sum(c.wall_time for c in others)
    assert mult.wall_time <= 30
    record(4, "torus battery over GF(25), 10^4 multiplicativity pairs", ok, t, note=failing(others) or f"multiplicativity {mult.wall_time:.1f} s")


def test_criterion_05_restriction(torus_checks):
    c = torus_checks["restriction onto T_W"]
    ok = c.ok and c.detail["lifts"] == 100 and c.detail["extension"] == "GF(15625)"
    record(5, "100 restriction lifts over GF(5^6)", ok, c.wall_time, note=failing([c]))


def test_criterion_06_sigma():
    t0 = time.perf_counter()
    checks = suites.sigma_suite(S11, F25, seed=0)
    record(6, "upsilon, sigma, sigma_M constants, conjugation, extensions", all(c.ok for c in checks),
           time.perf_counter() - t0, note=failing(checks))


def test_criterion_07_duality():
    t0 = time.perf_counter()
    checks = suites.duality_suite(S11, F25, seed=0)
    rejected = any(c.name == "Z/5 rejected" and c.ok for c in checks)
    record(7, "duality round trips, pullback identity, Z/5 rejected", all(c.ok for c in checks) and rejected,
           time.perf_counter() - t0, note=failing(checks))


def test_criterion_08_recover():
    t0 = time.perf_counter()
    groups = [Z(1), Z2, cyclic(2), cyclic(3), cyclic(4), cyclic(6), AbelianGroup(0, (2, 2)), AbelianGroup(1, (2,))]
    bad = []
    for seed in range(25):
        rng = np.random.default_rng(1000 + seed)
        fine = standard_grading(GroupHom.identity(Z2), S11) if seed % 2 == 0 else zz_grading(S11)
        phi = suites.random_hom(groups[seed % len(groups)], rng)
        coarse = coarsen(fine, phi)
        if not verify_grading(coarse):
            bad.append((seed, "coarsening does not verify"))
            continue
        rec = recover_homomorphism(fine, coarse)
        if not rec.agrees_with(phi) or not same_grading(coarsen(fine, rec.on_group or phi), coarse):
            bad.append((seed, "recovered map differs"))
        if seed % 2 == 0 and (rec.on_group is None or rec.on_group.images != phi.images):
            bad.append((seed, "map on Z^2 not recovered"))
    # non-refinements must be rejected with a witness
    witnesses = []
    try:
        recover_homomorphism(canonical_grading(S11), zz_grading(S11))
    except NotARefinement as exc:
        witnesses.append(exc.witness)
    std = standard_grading(GroupHom.identity(Z2), S11)
    one = cyclic(2).element([1])
    labels = [one if deg_standard(b) == (0, -1) else cyclic(2).identity for b in canonical_basis(S11)]
    try:
        recover_homomorphism(std, MonomialGrading(S11, std.field, cyclic(2), labels))
    except NotARefinement as exc:
        witnesses.append(exc.witness)
    ok = not bad and len(witnesses) == 2 and all(witnesses)
    record(8, "25 coarsen/recover round trips; non-refinements rejected with witnesses", ok,
           time.perf_counter() - t0, note=str(bad) if bad else "")


def test_criterion_09_twist_recover(tmp_path):
    t0 = time.perf_counter()
    groups = ["Z/3", "Z/2xZ/2", "Z/4", "Z/6", "Z/2"]
    kinds, bad = set(), []
    for seed in range(20):
        out = tmp_path / f"run{seed}.json"
        code = main(["twist-recover", "--n", "1,1", "--seed", str(seed), "--group", groups[seed % len(groups)],
                     "--out", str(out)])
        doc = json.loads(out.read_text())
        kinds.add(doc["pipeline"]["twist"])
        if code != 0:
            bad.append((seed, [c["name"] for c in doc["checks"] if c["verdict"] != "pass"]))
    ok = not bad and {"lambda", "exp", "sigma", "product"} <= kinds
    record(9, "20 twist-recover runs over lambda, exp, sigma_M and products", ok, time.perf_counter() - t0, 300,
           str(bad) if bad else f"twists {sorted(kinds)}")


def test_criterion_10_simplicity():
    t0 = time.perf_counter()
    checks = suites.simplicity_suite(S11)
    ok = all(c.ok for c in checks) and checks[0].detail == {"starts": 125}
    record(10, "ideal generated by each of the 125 basis vectors is everything", ok, time.perf_counter() - t0,
           note=failing(checks))


def test_criterion_11_negative_controls():
    t0 = time.perf_counter()
    notes = []
    zz = zz_grading(S11)
    degs = list(zz.degrees)
    degs[5] = degs[5] + Z2.element((0, 1))
    v1 = verify_grading(MonomialGrading(S11, zz.field, Z2, degs))
    v2 = verify_grading(suites._swapped_zz(S11))
    if v1.ok or v2.ok or not v1.witness or not v2.witness:
        notes.append("perturbed grading accepted")
    try:
        exp_ad(basis_element(S11, F25, BasisIndex("W1", (0, 0))))
        notes.append("exp_ad accepted a non-nilpotent element")
    except NilpotencyError:
        pass
    tv = in_torus(sigma_m(S11, F25))
    if tv.ok or not tv.obstruction:
        notes.append("sigma_M reported inside the torus")
    record(11, "negative controls: perturbed gradings, exp_ad, in_torus(sigma_M)", not notes,
           time.perf_counter() - t0, note="; ".join(notes))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
