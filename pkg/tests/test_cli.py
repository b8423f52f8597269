import re
import subprocess
import sys

import pytest

from invbv.cli import main

MOTIVATING = """(set-logic BV)
(declare-fun s () (_ BitVec 32))
(declare-fun t () (_ BitVec 32))
(assert (forall ((x (_ BitVec 32))) (distinct (bvadd x s) t)))
(check-sat)
"""

SAT_CASE = """(set-logic BV)
(declare-fun a () (_ BitVec 4))
(declare-fun b () (_ BitVec 4))
(assert (forall ((x (_ BitVec 4))) (not (= (bvmul x a) b))))
(check-sat)
"""

FLIPPED = """(set-logic BV)
(assert (forall ((x (_ BitVec 8))) (exists ((y (_ BitVec 8))) (= (bvadd x y) #x00))))
(check-sat)
"""


def run(tmp_path, capsys, text, *args):
    f = tmp_path / "in.smt2"
    f.write_text(text)
    rc = main(["solve", str(f), *args])
    out = capsys.readouterr()
    return rc, out.out, out.err


@pytest.mark.parametrize("config", ["k", "s", "b"])
def test_solve_unsat_with_stats(tmp_path, capsys, config):
    rc, out, err = run(tmp_path, capsys, MOTIVATING, "--config", config, "--stats")
    assert rc == 0 and out.strip() == "unsat"
    assert "instantiations=1" in err.splitlines()


def test_solve_budget(tmp_path, capsys):
    rc, out, err = run(tmp_path, capsys, MOTIVATING, "--config", "m", "--max-inst", "3", "--stats")
    assert rc == 1 and out.strip() == "unknown"
    assert "reason=instantiation budget 3 exhausted" in err


def test_solve_model(tmp_path, capsys):
    rc, out, _ = run(tmp_path, capsys, SAT_CASE, "--print-model")
    lines = out.splitlines()
    assert rc == 0 and lines[0] == "sat"
    vals = {}
    for line in lines[1:]:
        m = re.fullmatch(r"\(define-fun (\w+) \(\) \(_ BitVec 4\) #b([01]{4})\)", line)
        vals[m.group(1)] = int(m.group(2), 2)
    a, b = vals["a"], vals["b"]
    assert all((x * a) % 16 != b for x in range(16))


def test_flipped_input(tmp_path, capsys):
    rc, out, _ = run(tmp_path, capsys, FLIPPED, "--print-model")
    assert rc == 0 and out.splitlines() == ["sat"]


def test_backends(tmp_path, capsys):
    for backend in ("enum", "bitblast"):
        rc, out, _ = run(tmp_path, capsys, SAT_CASE, "--backend", backend, "--config", "m")
        assert out.strip() == "sat"


def test_errors(tmp_path, capsys):
    rc, _, err = run(tmp_path, capsys, "(set-logic BV)\n(assert (bvfoo #b1))")
    assert rc == 2 and "2:9" in err
    bad = "(set-logic BV)(declare-fun a () (_ BitVec 2))" \
          "(assert (exists ((p (_ BitVec 2))) (forall ((x (_ BitVec 2))) (exists ((y (_ BitVec 2))) (= (bvadd x y) p)))))"
    rc, _, err = run(tmp_path, capsys, bad)
    assert rc == 2 and "alternation" in err
    assert main(["solve", str(tmp_path / "missing.smt2")]) == 2
    assert main(["solve"]) == 2
    assert main(["solve", "x", "--config", "q"]) == 2


def test_verify_ic(capsys):
    assert main(["verify-ic", "--width-max", "2", "--entry", "udiv:right:sge"]) == 0
    out = capsys.readouterr().out
    assert "100.0%" in out
    assert main(["verify-ic", "--width-max", "1", "--format", "records", "--entry", "mul:left:eq"]) == 0
    assert '"status": "verified"' in capsys.readouterr().out
    assert main(["verify-ic", "--entry", "nope"]) == 2


def test_emitters(tmp_path, capsys):
    assert main(["emit-verify", "--out", str(tmp_path / "v"), "--width", "3"]) == 0
    assert len(list((tmp_path / "v").iterdir())) == 200
    assert main(["emit-sygus", "--out", str(tmp_path / "s"), "--grammar", "g"]) == 0
    assert len(list((tmp_path / "s").iterdir())) == 140
    assert main(["emit-verify", "--out", str(tmp_path / "v"), "--width", "70"]) == 2
    assert main(["dump-catalog", "--width", "2"]) == 0
    assert len(capsys.readouterr().out.splitlines()) >= 200 + 2


def test_console_script_and_stdin():
    r = subprocess.run([sys.executable, "-m", "invbv.cli", "solve", "-"], input=SAT_CASE,
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "sat"
