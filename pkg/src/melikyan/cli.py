"""Command-line front end.

    melikyan info --n 1,1
    melikyan verify jacobi --n 1,1
    melikyan grade spec.json --n 1,1
    melikyan twist-recover --seed 0 --n 1,1

Exit status: 0 when every check passes, 1 when some check fails, 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from . import suites
from .abelian import AbelianGroup, Z2, _check_dualizable, subgroup_generated
from .finite_field import CharacteristicError, FieldError, make_field
from .grading import standard_grading, support, verify_grading
from .melikyan import canonical_basis, deg_canonical, deg_standard, deg_zz, melikyan_shape
from .serialize import _schema, algebra_to_json, dumps, field_to_json, grading_to_json, hom_from_json

log = logging.getLogger("melikyan")

SUITES = ("jacobi", "grading", "torus", "sigma", "duality", "simplicity")


def _parse_n(text: str) -> tuple[int, int]:
    try:
        parts = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects two comma-separated integers, got {text!r}")
    if len(parts) != 2 or min(parts) < 1:
        raise argparse.ArgumentTypeError(f"--n expects two positive integers, got {text!r}")
    return parts


def _parse_group(text: str) -> AbelianGroup:
    """'Z/3', 'Z/2xZ/2', 'Z', 'Z^2xZ/2'."""
    rank, torsion = 0, []
    for part in text.replace(" ", "").split("x"):
        if part.startswith("Z/"):
            torsion.append(int(part[2:]))
        elif part == "Z":
            rank += 1
        elif part.startswith("Z^"):
            rank += int(part[2:])
        else:
            raise argparse.ArgumentTypeError(f"cannot parse group {text!r}")
    G, _ = AbelianGroup.from_presentation(rank + len(torsion), [[m * int(i == rank + j) for i in range(rank + len(torsion))] for j, m in enumerate(torsion)])
    return G


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_parse_n, default=(1, 1), help="shape n1,n2 (default 1,1)")
    common.add_argument("--field-degree", type=int, default=2, help="work over GF(5^k) (default 2)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, help="write the JSON document to this file")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="melikyan", description="Exact computations in the Melikyan algebras M(2; n).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common], help="dimensions, degree ranges and supports")
    v = sub.add_parser("verify", parents=[common], help="run a verification battery")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--samples", type=int, default=None, help="random Jacobi triples when the sweep is not exhaustive")
    g = sub.add_parser("grade", parents=[common], help="standard grading induced by a homomorphism from Z^2")
    g.add_argument("spec", help="hom-spec JSON file, or inline JSON text")
    t = sub.add_parser("twist-recover", parents=[common], help="twist a standard grading and recover it by duality")
    t.add_argument("--group", type=_parse_group, default=None, help="finite grading group, e.g. Z/3 or Z/2xZ/2")
    t.add_argument("--twist", choices=suites.TWISTS, default=None, help="twist kind (default chosen from the seed)")
    return p


def _certificate(args, argv: Sequence[str], shape, F, checks: list[suites.Check], extra: dict | None = None) -> dict:
    doc: dict[str, Any] = {
        "schema": _schema("certificate"),
        "tool": {"name": "melikyan", "version": __version__},
        "command": list(argv),
        "algebra": algebra_to_json(shape),
        "field": field_to_json(F),
        "seed": args.seed,
        "checks": [c.to_json() for c in checks],
        "summary": {"passed": sum(c.ok for c in checks), "failed": sum(not c.ok for c in checks)},
    }
    if extra:
        doc.update(extra)
    return doc


def _table(checks: list[suites.Check]) -> str:
    w = max([len(c.name) for c in checks] + [5])
    lines = [f"{'check':<{w}}  verdict  seconds", "-" * (w + 18)]
    for c in checks:
        lines.append(f"{c.name:<{w}}  {'pass' if c.ok else 'FAIL':<7}  {c.wall_time:7.2f}")
        if not c.ok:
            lines.append(f"{'':<{w}}  witness: {json.dumps(c.witness, default=str)}")
    return "\n".join(lines)


def _emit(args, doc: dict, text: str | None = None):
    body = dumps(doc)
    if args.out:
        args.out.write_text(body + "\n")
    if args.format == "table" and text is not None:
        print(text)
    elif not args.out:
        print(body)


def cmd_info(args, argv) -> int:
    shape = melikyan_shape(*args.n)
    basis = canonical_basis(shape)
    N = shape.dim
    can = [deg_canonical(b) for b in basis]
    std = sorted({deg_standard(b) for b in basis})
    zz = sorted({deg_zz(b) for b in basis})
    doc = {
        "schema": _schema("info"),
        "algebra": algebra_to_json(shape),
        "dims": {"O": N, "W": 2 * N, "Wtilde": 2 * N, "M": 5 * N},
        "canonical_degree_range": [min(can), max(can)],
        "standard_support": [list(d) for d in std],
        "standard_support_index": subgroup_generated([Z2.element(d) for d in std]).index,
        "zz_support_index": subgroup_generated([Z2.element(d) for d in zz]).index,
    }
    text = "\n".join([
        f"M(2; {shape.n}) over characteristic 5",
        f"  dim O = {N}, dim W = {2 * N}, dim W~ = {2 * N}, dim M = {5 * N}",
        f"  canonical degrees {min(can)} .. {max(can)}",
        f"  standard grading: {len(std)} support labels, generated subgroup index {doc['standard_support_index']}",
        f"  Z^2 grading by deg_zz: generated subgroup index {doc['zz_support_index']}",
    ])
    _emit(args, doc, text)
    return 0


def cmd_verify(args, argv) -> int:
    shape = melikyan_shape(*args.n)
    F = make_field(5, args.field_degree)
    names = SUITES if args.suite == "all" else (args.suite,)
    checks: list[suites.Check] = []
    skipped = []
    for name in names:
        log.info("running %s", name)
        if name == "jacobi":
            kw = {"samples": args.samples} if args.samples else {}
            checks += suites.jacobi_suite(shape, args.seed, **kw)
        elif name == "grading":
            checks += suites.grading_suite(shape, args.seed)
        elif name == "torus":
            checks += suites.torus_suite(shape, F, args.seed)
        elif name == "sigma":
            if args.suite == "all" and shape.n[0] != shape.n[1]:
                skipped.append("sigma (n1 != n2)")
                continue
            checks += suites.sigma_suite(shape, F, args.seed)
        elif name == "duality":
            checks += suites.duality_suite(shape, F, args.seed)
        elif name == "simplicity":
            checks += suites.simplicity_suite(shape, args.seed)
    extra = {"suite": args.suite}
    if skipped:
        extra["skipped"] = skipped
    _emit(args, _certificate(args, argv, shape, F, checks, extra), _table(checks))
    return 0 if all(c.ok for c in checks) else 1


def _load_spec(text: str) -> dict:
    path = Path(text)
    try:
        raw = path.read_text() if path.exists() else text
        return json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise suites.UsageError(f"cannot read hom-spec: {exc}") from exc


def cmd_grade(args, argv) -> int:
    shape = melikyan_shape(*args.n)
    F = make_field(5, args.field_degree)
    try:
        phi = hom_from_json(_load_spec(args.spec))
    except (KeyError, TypeError, ValueError) as exc:
        raise suites.UsageError(f"invalid hom-spec: {exc}") from exc
    if phi.domain != Z2:
        raise suites.UsageError("a standard grading needs a homomorphism from Z^2")
    G = standard_grading(phi, shape, F)
    v = verify_grading(G)
    duality: dict[str, Any] = {"available": True}
    try:
        _check_dualizable(phi.codomain, F)
    except CharacteristicError as exc:
        duality = {"available": False, "reason": "order-5 elements", "detail": str(exc)}
    except (FieldError, ValueError) as exc:
        duality = {"available": False, "reason": str(exc)}
    doc = grading_to_json(G)
    doc["verdict"] = "pass" if v.ok else "fail"
    if not v.ok:
        doc["witness"] = v.witness
    doc["support"] = sorted(list(g.coords) for g in support(G))
    doc["duality"] = duality
    text = "\n".join([
        f"grading by {phi.codomain}: {len(G.components)} components, verdict {doc['verdict']}",
        f"  dims: " + ", ".join(f"{list(g.coords)}:{B.shape[0]}" for g, B in sorted(G.components, key=lambda c: c[0].coords)),
        f"  duality: {'available' if duality['available'] else 'unavailable (' + duality['reason'] + ')'}",
    ])
    _emit(args, doc, text)
    return 0 if v.ok else 1


def cmd_twist_recover(args, argv) -> int:
    shape = melikyan_shape(*args.n)
    F = make_field(5, args.field_degree)
    checks, info = suites.twist_recover(shape, F, args.seed, args.group, args.twist)
    _emit(args, _certificate(args, argv, shape, F, checks, {"pipeline": info}), _table(checks))
    return 0 if all(c.ok for c in checks) else 1


COMMANDS = {"info": cmd_info, "verify": cmd_verify, "grade": cmd_grade, "twist-recover": cmd_twist_recover}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.field_degree < 1:
        print("error: --field-degree must be positive", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args, argv)
    except (suites.UsageError, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
