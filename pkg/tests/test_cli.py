import json
import subprocess
import sys

import pytest

from melikyan.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_times(doc):
    for c in doc.get("checks", []):
        c.pop("wall_time", None)
    return doc


def test_info(capsys):
    code, out, _ = run(capsys, "info", "--n", "2,1")
    doc = json.loads(out)
    assert code == 0
    assert doc["dims"]["M"] == 625
    assert doc["zz_support_index"] == 3 and doc["standard_support_index"] == 1
    code, out, _ = run(capsys, "info", "--format", "table")
    assert "canonical degrees -3 .. 23" in out


def test_verify_grading_deterministic(capsys, tmp_path):
    code1, out1, _ = run(capsys, "verify", "grading", "--seed", "4")
    code2, out2, _ = run(capsys, "verify", "grading", "--seed", "4")
    assert code1 == code2 == 0
    d1, d2 = json.loads(out1), json.loads(out2)
    assert d1["schema"] == "melikyan.certificate/1"
    assert d1["summary"]["failed"] == 0
    assert strip_times(d1) == strip_times(d2)
    path = tmp_path / "cert.json"
    assert main(["verify", "grading", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["suite"] == "grading"


def test_sigma_needs_square_shape(capsys):
    code, _, err = run(capsys, "verify", "sigma", "--n", "1,2")
    assert code == 2 and "n1 = n2" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["info", "--n", "0,1"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "grade", "{not json")
    assert code == 2 and "hom-spec" in err
    code, _, _ = run(capsys, "twist-recover", "--group", "Z/5")
    assert code == 2


def test_grade(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"codomain": {"torsion": [3]}, "images": [[1], [2]]}))
    code, out, _ = run(capsys, "grade", str(spec))
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass" and doc["duality"]["available"]
    code, out, _ = run(capsys, "grade", json.dumps({"codomain": {"torsion": [5]}, "images": [[1], [0]]}))
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass"
    assert doc["duality"] == {"available": False, "reason": "order-5 elements", "detail": doc["duality"]["detail"]}


def test_twist_recover(capsys):
    code, out, _ = run(capsys, "twist-recover", "--seed", "2", "--twist", "sigma", "--group", "Z/2xZ/2")
    doc = json.loads(out)
    assert code == 0
    assert doc["pipeline"]["twist"] == "sigma" and doc["pipeline"]["group"]
    assert all(c["verdict"] == "pass" for c in doc["checks"])


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "melikyan", "info"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["dims"]["M"] == 125
