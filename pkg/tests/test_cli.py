import subprocess
import sys
from pathlib import Path

import pytest

from strongbound.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *args):
    status = main([str(a) for a in args])
    out = capsys.readouterr().out
    fields = dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)
    return status, out, fields


def test_build_extension_trivial(capsys):
    status, out, f = run(capsys, "build-extension", "--spec", DATA / "z3_trivial.spec")
    assert status == 0
    assert f["min_relator_length"] == "64"
    assert f["relator_lengths"] == "64"
    assert out.rstrip().splitlines()[-1] == "RESULT: pass"


def test_build_extension_k_override_fails(capsys):
    status, _, f = run(capsys, "build-extension", "--spec", DATA / "z3_trivial.spec", "--k", "1")
    assert status == 1 and f["RESULT"] == "violation"


def test_solve_word_empty(capsys, tmp_path):
    rel = tmp_path / "r.txt"
    rel.write_text("")
    status, _, f = run(capsys, "solve-word", "--group", DATA / "z3.grp", "--relators", rel)
    assert status == 0 and f["RESULT"] == "identity"


def test_solve_word_relator(capsys, tmp_path):
    rel = tmp_path / "r.txt"
    status, out, _ = run(capsys, "build-extension", "--spec", DATA / "z2_k1.spec", "--k", "12", "-v")
    assert status == 0
    lines = [l.split(": ", 1)[1] for l in out.splitlines() if l.startswith("relator: ")]
    rel.write_text("\n".join(lines) + "\n")
    status, _, f = run(capsys, "solve-word", "--group", DATA / "z2.grp", "--relators", rel, *lines[0].split())
    assert status == 0 and f["RESULT"] == "identity"
    status, _, f = run(capsys, "solve-word", "--group", DATA / "z2.grp", "--relators", rel, "c", "a@1")
    assert status == 0 and f["RESULT"] == "nontrivial"


def test_check_c16(capsys, tmp_path):
    rel = tmp_path / "r.txt"
    rel.write_text("c^3\n")
    status, _, f = run(capsys, "check-c16", "--relators", rel)
    assert status == 1 and f["violated_condition"] == "1"
    rel.write_text("c^1 a@1 c^2 a2@1\n")
    status, _, f = run(capsys, "check-c16", "--group", DATA / "z3.grp", "--relators", rel, "--eta", "1/2")
    assert status == 1 and f["violated_condition"] == "2"
    status, _, f = run(capsys, "check-c16", "--group", DATA / "z3.grp", "--relators", rel, "--eta", "9/10")
    assert status == 0 and f["RESULT"] == "certificate"


def test_dominate(capsys):
    status, _, f = run(capsys, "dominate", "interval-tower", "--depth", "4")
    assert status == 0 and f["g"].startswith("1,4,7,10")
    status, _, f = run(capsys, "dominate", DATA / "constant.rule", "--depth", "3")
    assert status == 0 and f["g"] == "1,2,3,4"


def test_gamma_chain(capsys):
    status, _, f = run(capsys, "gamma-chain", "--group", DATA / "s3.grp", "(12)", "(123)")
    assert status == 0 and f["limit_size"] == "6"


def test_filtration(capsys):
    status, _, f = run(capsys, "filtration", "--count", "8", "--depth", "12")
    assert status == 0 and f["a_7"].startswith("{14}")
    status, _, f = run(capsys, "filtration", "finite-powerset", "3")
    assert status == 0


@pytest.mark.parametrize("args", [
    ["build-extension"],
    ["build-extension", "--spec", "/nonexistent.spec"],
    ["check-c16", "--relators", "/nonexistent"],
    ["gamma-chain", "--group", str(DATA / "s3.grp"), "zz"],
    ["dominate", "no-such-rule"],
    ["filtration", "mystery"],
    ["check-c16", "--relators", str(DATA / "z2.grp"), "--eta", "3/2"],
])
def test_parse_errors(capsys, args):
    status, _, f = run(capsys, *args)
    assert status == 2 and f["RESULT"] == "input-error"


def test_resource_guards(capsys, tmp_path):
    status, _, f = run(capsys, "build-extension", "--spec", DATA / "s3_n2.spec", "--max-relators", "3")
    assert status == 3 and f["RESULT"] == "resource-limit"
    status, _, f = run(capsys, "filtration", "--count", "3", "--support-bound", "1")
    assert status == 3


def test_out_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        main(["build-extension", "--spec", str(DATA / "s3_n2.spec"), "--out", str(path)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().endswith("RESULT: pass\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "strongbound", "dominate", "constant-tower", "--depth", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "g: 1,2,3" in proc.stdout
