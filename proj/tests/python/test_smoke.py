"""End-to-end smoke tests over the native module."""

import os
import pathlib
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "python"))
sys.path.insert(0, os.environ.get("QFC_BUILD_DIR", str(ROOT / "build")))

qfc = pytest.importorskip("qfc")

CORPUS = ROOT / "corpus"
DIV = (CORPUS / "div.fp").read_text()
DIV_ANN = (CORPUS / "div.ann").read_text()
EXPDOUBLE = (CORPUS / "expdouble.fp").read_text()
MINUS = (CORPUS / "minus.fp").read_text()


def numeral(n):
    out = "0"
    for _ in range(n):
        out = f"S({out})"
    return out


def test_eval_division():
    r = qfc.eval_program(DIV, f"q({numeral(7)}, {numeral(2)})")
    assert not r["timeout"]
    assert r["value"] == numeral(4)  # ceil(7/2)


def test_eval_timeout():
    loop = (CORPUS / "loop.fp").read_text()
    r = qfc.eval_program(loop, "f(0)", max_steps=1000)
    assert r["timeout"]


def test_eval_memo_cache():
    r = qfc.eval_program(DIV, f"q({numeral(9)}, {numeral(3)})", memo=True)
    assert r["value"] == numeral(3)
    assert r["cache_entries"] > 0


def test_analyze_division():
    r = qfc.analyze(DIV)
    assert [c for c in r["precedence_classes"]] == [["minus"], ["q"]]
    assert len(r["fraternities"]) == 2
    assert not r["nested"]


def test_check_division_quasi_friendly():
    r = qfc.check(DIV, DIV_ANN)
    assert r["status"] == "quasi-friendly"
    for f in r["fraternities"]:
        assert f["cond1"]["kind"] == "Valid"
        assert f["cond2"]["kind"] == "Valid"


def test_check_exp_not_quasi_friendly():
    ann = (CORPUS / "expdouble.ann").read_text()
    r = qfc.check(EXPDOUBLE, ann, search_weights=True)
    assert r["status"] == "not-quasi-friendly"
    assert not r["searched"]


def test_rpo_expdouble_ordered():
    r = qfc.rpo(EXPDOUBLE)
    assert r["ordered"]
    assert all(s == "product" for s in r["statuses"].values())


def test_synthesize_minus():
    r = qfc.synthesize(MINUS)
    assert r["found"]
    assert r["assignment"]["S"] == "1 + X1"


def test_synthesize_division_fails():
    r = qfc.synthesize(DIV)
    assert not r["found"]
    assert not r["timed_out"]


def test_bounds_exp_super_polynomial():
    r = qfc.bounds(EXPDOUBLE, "exp", grid=12)
    assert r["super_polynomial"]


def test_bounds_division_linear():
    r = qfc.bounds(DIV, "q", grid=15)
    assert not r["super_polynomial"]
    assert r["output_degree"] <= 1


def test_parse_error():
    with pytest.raises(Exception):
        qfc.analyze("f(x = ")
