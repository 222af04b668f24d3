import csv
import io
import json
import math
import subprocess
import sys

import pytest

from affinelie.algebra import aff_r, to_json
from affinelie.atlas import family_product
from affinelie.cli import GEODESIC_HEADER, clean, main
from affinelie.projective import sl2_left_regular_rep


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def js(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_clean_rounds_and_encodes():
    assert clean({"a": 1 / 3, "b": float("inf"), "c": float("nan"), "d": -0.0}) == \
        {"a": 0.333333333333, "b": "inf", "c": "nan", "d": 0.0}


@pytest.mark.parametrize("point,label,special", [
    ("1,0,0,0,0,0", "A1", ["bi-invariant"]),
    ("0,0,0,0,0,0", "F1(0)", ["complete"]),
    ("2,0,0,0,1,0", "R1", ["Hessian"]),
])
def test_classify_point(capsys, point, label, special):
    code, doc = js(capsys, "classify", "--point", point)
    assert code == 0 and doc["on_variety"] and doc["label"] == label and doc["special"] == special


def test_classify_negative_point_needs_equals(capsys):
    code, doc = js(capsys, "classify", "--point=-1,-1,0,0,0,0")
    assert code == 0 and doc["label"] == "F1(-1)"


def test_classify_off_variety(capsys):
    code, doc = js(capsys, "classify", "--point", "1,1,1,1,1,1")
    assert code == 1 and not doc["on_variety"] and doc["residual"] == [1.0, 0.0, -2.0, -1.0]


def test_classify_product_file(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps(to_json(aff_r(), family_product("R2"))))
    code, doc = js(capsys, "classify", "--product", str(f))
    assert code == 0 and doc["label"] == "R2"


def test_classify_product_with_wrong_torsion(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"dim": 2, "product": [[0, 0, 0, 1.0]]}))
    code, doc = js(capsys, "classify", "--product", str(f))
    assert code == 1 and doc["torsion_residual"] == 1.0


@pytest.mark.parametrize("argv", [
    ["classify", "--point", "1,2,3"],
    ["classify", "--point", "a,b,c,d,e,f"],
    ["classify"],
    ["classify", "--product", "/nonexistent.json"],
    ["verify", "--only", "nope"],
    ["rep", "--family", "a1", "--at=-1,0"],
    ["rep", "--family", "zz"],
    ["afftrans", "--case", "4", "--params=-1,0,1,0"],
    ["afftrans", "--case", "1"],
    ["projective"],
    ["geodesic", "--family", "f1"],
    ["atlas", "--format", "csv"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["afftrans", "--case", "9"])
    assert exc.value.code == 2


def test_verify_subset_and_determinism(capsys):
    code1, out1, _ = run(capsys, "verify", "--only", "algebra,variety", "--seed", "3")
    code2, out2, _ = run(capsys, "verify", "--only", "algebra,variety", "--seed", "3")
    assert code1 == code2 == 0 and out1 == out2
    doc = json.loads(out1)
    assert doc["seed"] == 3 and set(doc["suites"]) == {"algebra", "variety"} and "findings" not in doc


def test_verify_mutation_fails(capsys):
    code, doc = js(capsys, "verify", "--only", "algebra", "--mutate")
    assert code == 1 and not doc["suites"]["algebra"]["checks"]["F1(2)"]["ok"]


def test_verify_tolerance_overrides(capsys, tmp_path):
    cfg = tmp_path / "tol.json"
    cfg.write_text(json.dumps({"lsa": 1e-6}))
    code, doc = js(capsys, "verify", "--only", "algebra", "--config", str(cfg))
    assert code == 0 and doc["tolerances"]["lsa"] == 1e-6
    code, doc = js(capsys, "verify", "--only", "algebra", "--tol", "1e-3")
    assert set(doc["tolerances"].values()) == {1e-3}
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "verify", "--config", str(cfg))[0] == 2


def test_atlas(capsys):
    code, doc = js(capsys, "atlas")
    assert code == 0 and doc["aff_dims"] == [4, 4, 4, 4, 6, 2]
    f1 = next(f for f in doc["families"] if f["family"] == "F1")
    assert f1["complete"] == [0.0]


def test_geodesic_csv(capsys):
    code, out, _ = run(capsys, "geodesic", "--family", "f1", "--alpha", "0", "--a", "2", "--b", "3",
                       "--formulation", "literal", "--n", "11")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == GEODESIC_HEADER and len(rows) == 12
    t, x, y = (float(v) for v in rows[-1][:3])
    assert t == 1.0 and x == pytest.approx(3.0, abs=1e-8) and y == pytest.approx(1.5 * (1 - math.exp(-2)), abs=1e-8)
    assert float(rows[-1][7]) < 1e-8


def test_geodesic_json_r1(capsys):
    code, doc = js(capsys, "geodesic", "--family", "r1", "--a", "0", "--b", "1", "--T", "0.5",
                   "--formulation", "literal", "--n", "3", "--format", "json")
    t, x, y = doc["rows"][-1][:3]
    assert code == 0 and t == 0.5 and x == pytest.approx(0.856, abs=5e-4) and y == pytest.approx(math.pi / 6, abs=1e-8)


def test_geodesic_printed_note(capsys):
    code, doc = js(capsys, "geodesic", "--family", "r1", "--a", "1", "--b", "1", "--formulation", "literal",
                   "--format", "json", "--n", "3")
    assert code == 0 and doc["closed_form_domain"] is None and "a*b" in doc["closed_form_note"]


def test_rep(capsys):
    code, doc = js(capsys, "rep", "--family", "r1", "--at", "2,1", "--verify")
    assert code == 0 and doc["matrix"][0] == [4.0, 2.0, 2.0] and doc["verify"]["ok"]


def test_afftrans_examples(capsys):
    code, doc = js(capsys, "afftrans", "--case", "6", "--params", "2,3", "--at", "1,0")
    assert code == 0 and doc["image"] == [2.0, 3.0]
    code, doc = js(capsys, "afftrans", "--case", "4", "--params", "2,1,3,0", "--at", "1,1")
    assert code == 0 and doc["image"] == [2.0, 4.0]


def test_afftrans_verify(capsys):
    code, doc = js(capsys, "afftrans", "--case", "6", "--verify")
    assert code == 0 and doc["verify"]["ok"]
    code, doc = js(capsys, "afftrans", "--case", "4", "--verify")
    assert code == 1 and doc["verify"]["cocycle_derived"]["found"]


def test_projective(capsys, tmp_path):
    assert js(capsys, "projective", "--example", "sl2-left-regular")[0] == 0
    code, doc = js(capsys, "projective", "--example", "sl2-printed")
    assert code == 1 and doc["rank"] == 1
    f = tmp_path / "rep.json"
    f.write_text(json.dumps(sl2_left_regular_rep().to_json()))
    code, doc = js(capsys, "projective", "--rep", str(f), "--w", "1,0,0,1")
    assert code == 0 and doc["bracket_residual"] == 0.0


def test_text_format_and_out_file(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--point", "1,0,0,0,0,0", "--format", "text")
    assert code == 0 and 'label: "A1"' in out
    target = tmp_path / "o.json"
    code, out, _ = run(capsys, "atlas", "--out", str(target))
    assert out == "" and json.loads(target.read_text())["aff_dims"][4] == 6


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "affinelie", "classify", "--point", "0,0,0,0,0,0"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0 and json.loads(r.stdout)["label"] == "F1(0)"
