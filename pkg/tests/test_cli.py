import json
import subprocess
import sys

import numpy as np
import pytest

from hadamard.cli import emit_report, main
from hadamard.core import read_matrix, write_matrix
from hadamard.constructions import walsh_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def js(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_construct_and_verify(tmp_path, capsys):
    f = tmp_path / "f5.mat"
    code, rep = js(capsys, "construct", "fourier", "5", "--out", str(f))
    assert code == 0 and rep["is_hadamard"]
    assert read_matrix(f).level == 5
    code, rep = js(capsys, "verify", str(f))
    assert code == 0 and rep["is_hadamard"]


def test_construct_prints_matrix(capsys):
    code, out, _ = run(capsys, "construct", "walsh", "2")
    assert code == 0 and out.startswith("butson 4 4 2")
    code, out, _ = run(capsys, "construct", "paley", "7")
    assert code == 0 and "8 8" in out.splitlines()[0]


def test_verify_failure_exit_2(tmp_path, capsys):
    f = tmp_path / "ones.mat"
    write_matrix(f, np.ones((3, 3)))
    code, rep = js(capsys, "verify", str(f))
    assert code == 2 and not rep["is_hadamard"]


def test_usage_and_missing(capsys):
    assert run(capsys, "nope")[0] == 64
    assert run(capsys, "verify")[0] == 64
    assert run(capsys, "verify", "/no/such/file")[0] == 2
    assert run(capsys, "construct", "paley", "9")[0] == 2


def test_defect(tmp_path, capsys):
    f = tmp_path / "f5.mat"
    main(["construct", "fourier", "5", "--out", str(f)])
    capsys.readouterr()
    code, rep = js(capsys, "defect", str(f))
    assert code == 0 and rep["defect"] == 9 and rep["closed_form"] == 9 and rep["agree"]
    assert "dephased_defect" in rep
    w = tmp_path / "w8.mat"
    main(["construct", "walsh", "3", "--out", str(w)])
    capsys.readouterr()
    code, rep = js(capsys, "defect", str(w), "--exact")
    assert code == 0 and rep["defect"] == 36


def test_glow_formats(tmp_path, capsys):
    f = tmp_path / "f3.mat"
    main(["construct", "fourier", "3", "--out", str(f)])
    capsys.readouterr()
    code, rep = js(capsys, "glow", str(f), "--p", "2", "--exact", "--mc", "2000")
    assert code == 0
    rows = rep["moments"] if "moments" in rep else rep["rows"]
    assert {"p", "exact", "mc_estimate", "mc_stderr"} <= set(rows[0])
    code, out, _ = run(capsys, "glow", str(f), "--p", "2", "--mc", "1000", "--format", "csv")
    assert code == 0 and out.splitlines()[0].startswith("p,")
    code, out, _ = run(capsys, "glow", str(f), "--p", "2", "--mc", "1000", "--format", "table")
    assert code == 0 and "mc_estimate" in out.splitlines()[0]


def test_seed_determinism(tmp_path, capsys):
    f = tmp_path / "f3.mat"
    main(["construct", "fourier", "3", "--out", str(f)])
    capsys.readouterr()
    a = run(capsys, "glow", str(f), "--mc", "500", "--seed", "7")[1]
    b = run(capsys, "glow", str(f), "--mc", "500", "--seed", "7")[1]
    c = run(capsys, "glow", str(f), "--mc", "500", "--seed", "8")[1]
    assert a == b and a != c


def test_partial(tmp_path, capsys):
    code, rep = js(capsys, "partial", "--count", "3", "8")
    assert code == 0 and rep["count"] == 256 * 2520
    W = walsh_matrix(2)
    f = tmp_path / "www.mat"
    write_matrix(f, np.hstack([W, W, W]).astype(float))
    code, rep = js(capsys, "partial", "--complete", str(f))
    assert code == 0 and rep["completable"] is False


def test_obstruct(capsys):
    code, rep = js(capsys, "obstruct", "--N", "6", "--l", "2")
    assert code == 0
    assert rep["first_failing"] == "sylvester"


def test_circulant_and_quantum(capsys):
    code, rep = js(capsys, "circulant", "--fourier", "6", "--phi")
    assert code == 0 and rep["is_hadamard"] and abs(rep["phi"] - 36) < 1e-8
    code, rep = js(capsys, "quantum", "--kesten", "2", "2", "2")
    assert code == 0 and rep["exact"] == 3
    code, rep = js(capsys, "quantum", "--semigroup", "3", "8")
    assert code == 0 and rep["size"] == 15


def test_catalogue(capsys):
    code, out, _ = run(capsys, "catalogue", "--list", "--format", "table")
    assert code == 0 and "MW10" in out
    code, out, _ = run(capsys, "catalogue", "H6")
    assert code == 0 and out.startswith("complex 6 6")


def test_emit_report_json_is_stable():
    r = {"b": 1.5, "a": complex(1, 2), "c": [1, 2]}
    assert emit_report(r, "json") == emit_report(dict(reversed(list(r.items()))), "json")


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "hadamard", "catalogue", "--list"], capture_output=True, text=True)
    assert p.returncode == 0 and "F2" in p.stdout
