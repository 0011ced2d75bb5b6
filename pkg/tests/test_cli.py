import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from vortexlab.chains import adler_moser
from vortexlab.cli import build_family, main, selftest_results
from vortexlab.exact_core import Poly, parse_scalar

Z = Poly.gen()


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def q2_doc(tmp_path, capsys):
    path = tmp_path / "q2.json"
    code, _, err = run(["generate", "--family", "lambda2_plus", "--n", "2", "--param", "r1=1",
                        "--param", "s2=0", "--out", str(path)], capsys)
    assert code == 0, err
    return path


def test_generate_lambda2_plus_q2(q2_doc):
    doc = json.loads(q2_doc.read_text())
    assert Poly.from_json(doc["polynomials"]["q2"]) == Z ** 5 - 4
    assert doc["family"] == "lambda2_plus"
    assert doc["params"] == {"r1": "1", "s2": "0"}
    # q2 carries +2, p1 carries -1
    charges = sorted(v["q"] for v in doc["configuration"]["vortices"])
    assert charges.count("2/1") == 5


def test_verify_generated_document(q2_doc, capsys):
    code, out, _ = run(["verify", str(q2_doc)], capsys)
    assert code == 0
    assert "PASS" in out and "match" in out


def test_verify_rejects_perturbed_position(q2_doc, capsys):
    doc = json.loads(q2_doc.read_text())
    z = doc["configuration"]["vortices"][0]["z"]
    z[0] = str(float(z[0]) + 1e-3)
    q2_doc.write_text(json.dumps(doc))
    code, out, _ = run(["verify", str(q2_doc)], capsys)
    assert code == 1
    assert "FAIL" in out


def test_verify_flags_edited_polynomial(q2_doc, capsys):
    doc = json.loads(q2_doc.read_text())
    doc["polynomials"]["q2"] = (Z ** 5 - 5).to_json()
    q2_doc.write_text(json.dumps(doc))
    code, out, _ = run(["verify", str(q2_doc)], capsys)
    assert code == 1
    assert "DIFFER" in out


@pytest.mark.parametrize("text", ["{not json", json.dumps({"vortices": []}),
                                  json.dumps({"geometry": "plane", "vortices": [{"z": [1]}]})])
def test_verify_malformed_input(tmp_path, capsys, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = run(["verify", str(path)], capsys)
    assert code == 2
    assert "error" in err


@pytest.mark.parametrize("argv", [
    ["generate", "--family", "nope", "--n", "2"],
    ["generate", "--family", "adler_moser", "--n", "0"],
    ["generate", "--family", "adler_moser", "--n", "2", "--param", "s1"],
    ["generate", "--family", "adler_moser", "--n", "2", "--param", "s1=1/0"],
    ["generate", "--family", "lambda2", "--branch", "x", "--n", "2"],
    ["generate", "--family", "adler_moser", "--n", "2", "--bogus"],
    ["verify", "/nonexistent/file.json"],
])
def test_malformed_arguments_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_generate_adler_moser_example(tmp_path, capsys):
    path = tmp_path / "am.json"
    code, _, _ = run(["generate", "--family", "adler_moser", "--n", "3", "--param", "s1=1",
                      "--param", "s2=0", "--out", str(path)], capsys)
    assert code == 0
    doc = json.loads(path.read_text())
    want = adler_moser(3, {"s1": 1, "s2": 0})
    assert Poly.from_json(doc["polynomials"]["P3"]) == want
    assert run(["verify", str(path)], capsys)[0] == 0


def test_round_trip_bit_identical(tmp_path, capsys):
    path = tmp_path / "rt.json"
    argv = ["generate", "--family", "lambda2", "--branch", "-", "--n", "2",
            "--param", "s-1=3/7", "--param", "r-2=-2/5", "--param", "s-2=1/3+1/2i", "--out", str(path)]
    assert run(argv, capsys)[0] == 0
    doc = json.loads(path.read_text())
    polys, _ = build_family("lambda2_minus", 2, {"s-1": F(3, 7), "r-2": F(-2, 5), "s-2": parse_scalar("1/3+1/2i")})
    stored = {k: Poly.from_json(v) for k, v in doc["polynomials"].items()}
    assert stored == polys
    for name, p in stored.items():
        assert json.dumps(p.to_json()) == json.dumps(polys[name].to_json())
    assert run(["verify", str(path)], capsys)[0] == 0


def test_translating_generate_and_verify(tmp_path, capsys):
    path = tmp_path / "tr.json"
    code, _, _ = run(["generate", "--family", "adler_moser", "--n", "2", "--k", "3/2",
                      "--param", "s1=1/5", "--out", str(path)], capsys)
    assert code == 0
    assert run(["verify", str(path)], capsys)[0] == 0


def test_export_csv(q2_doc, capsys):
    code, out, _ = run(["export", str(q2_doc), "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "re,im,q"
    assert len(lines) == 1 + 5 + 5


def test_roots_subcommand(capsys):
    code, out, _ = run(["roots", "--family", "adler_moser", "--n", "2", "--param", "s1=1"], capsys)
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "poly,re,im"
    assert sum(r.startswith("P2,") for r in rows) == 3


def test_selftest_passes_and_is_deterministic(capsys):
    code, out, _ = run(["selftest", "--seed", "7"], capsys)
    assert code == 0
    assert all(line.startswith("PASS") for line in out.strip().splitlines())
    code2, out2, _ = run(["selftest", "--seed", "7"], capsys)
    assert (code2, out2) == (code, out)
    assert selftest_results(3) == selftest_results(3)


def test_help_lists_defaults(capsys):
    assert main(["generate", "--help"]) == 0
    text = capsys.readouterr().out
    assert "default" in text and "--precision-bits" in text and "--seed" in text


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vortexlab.cli", "selftest", "--seed", "1"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
