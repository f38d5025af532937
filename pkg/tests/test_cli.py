import json

import numpy as np
import pytest

from pbsdiagrams.channels import fixture_pairs
from pbsdiagrams.cli import main
from pbsdiagrams.dsl import parse
from pbsdiagrams.io import read_channel, read_matrix, write_channel, write_matrix
from pbsdiagrams.equiv import DistinguishingWitness
from pbsdiagrams.linalg import max_abs_diff

ABAB_LOOP = "tr((id + gate[a]) ; (id + neg) ; (id + gate[b]) ; pbs)\n"


@pytest.fixture
def files(tmp_path):
    for name, (a, b) in fixture_pairs().items():
        write_channel(tmp_path / f"{name}_a.chan", a)
        write_channel(tmp_path / f"{name}_b.chan", b)
    (tmp_path / "abab_loop.pbs").write_text(ABAB_LOOP)
    (tmp_path / "abab.txt").write_text("V,0: abab\nH,0: -\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_paths(files, capsys):
    code, out = run(capsys, "paths", files / "abab_loop.pbs")
    assert code == 0 and "V,0 -> abab V,0" in out.out


def test_synth_roundtrip(files, capsys):
    out_pbs = files / "right.pbs"
    assert run(capsys, "synth", "--family", files / "abab.txt", "-o", out_pbs)[0] == 0
    code, out = run(capsys, "paths", out_pbs)
    assert code == 0 and out.out == "H,0 -> - H,0\nV,0 -> abab V,0\n"
    code, out = run(capsys, "congruent", out_pbs, files / "abab_loop.pbs")
    assert code == 1 and out.out.strip() == "false"
    assert run(capsys, "synth", "--family", files / "abab.txt", "--neg-free")[0] == 1


def test_typecheck(files, capsys):
    code, out = run(capsys, "typecheck", files / "abab_loop.pbs")
    assert code == 0 and "arity 1" in out.out and "alphabet a,b" in out.out
    bad = files / "bad.pbs"
    bad.write_text("gate[a] ; gate[a]")
    assert run(capsys, "typecheck", bad)[0] == 1
    bad.write_text("gate[a] ;")
    code, out = run(capsys, "typecheck", bad)
    assert code == 2 and "line 1, column 10" in out.err


def test_equiv_exit_codes(files, capsys):
    a, b = files / "I_vs_minusI_a.chan", files / "I_vs_minusI_b.chan"
    code, out = run(capsys, "equiv", "--level", "1", a, b)
    rec = json.loads(out.out)
    assert code == 1 and rec["failed_criteria"] == ["T1"]
    assert abs(rec["witness"]["separation"] - 2) < 1e-9
    code, out = run(capsys, "equiv", "--level", "0", a, b)
    assert code == 0 and json.loads(out.out)["equivalent"] is True
    code, _ = run(capsys, "--tol", "1e-6", "equiv", "--level", "2", files / "qutrit_X_vs_XN_a.chan", files / "qutrit_X_vs_XN_b.chan")
    assert code == 0


def test_distinguish_writes_witness(files, capsys):
    out_dir = files / "w"
    a_path, b_path = files / "CNOT_vs_sqrtZZ_CNOT_a.chan", files / "CNOT_vs_sqrtZZ_CNOT_b.chan"
    code, _ = run(capsys, "distinguish", "--level", "2", a_path, b_path, "-o", out_dir, "--seed", "3")
    assert code == 1
    ctx = parse((out_dir / "context.pbs").read_text())
    assignment = {p.stem: read_channel(p) for p in (out_dir / "channels").glob("*.chan")}
    w = DistinguishingWitness(ctx, assignment, read_matrix(out_dir / "input.mat"), 0.0)
    out_a, out_b = w.outputs(read_channel(a_path), read_channel(b_path))
    assert max_abs_diff(out_a, out_b) > 1e-6
    code, out = run(capsys, "distinguish", "--level", "1", a_path, b_path, "-o", files / "none")
    assert code == 0


def test_choi(files, capsys):
    g = files / "gates"
    g.mkdir()
    a, b = fixture_pairs()["CNOT_vs_sqrtZZ_CNOT"]
    write_channel(g / "a.chan", a)
    write_channel(g / "b.chan", b)
    code, out = run(capsys, "choi", files / "abab_loop.pbs", "--channels", g)
    rec = json.loads(out.out)
    assert code == 0
    assert (rec["pol_dim"], rec["n"], rec["dim_h"], rec["basis_order"]) == (2, 1, 2, "pol,pos,data")
    assert np.asarray(rec["choi"]).shape == (16, 16, 2)
    code, out = run(capsys, "choi", files / "abab_loop.pbs")
    assert code == 2 and "no channel" in out.err


def test_iso_commands(files, capsys):
    a, b = files / "qutrit_X_vs_XN_a.chan", files / "qutrit_X_vs_XN_b.chan"
    code, out = run(capsys, "iso-refute", a, b, "--kmax", "5")
    rec = json.loads(out.out)
    assert code == 1 and rec["refuted"] and rec["k"] == 3
    assert rec["moment_a"] == [[[1.0, 0.0]]] and rec["moment_b"] == [[[-1.0, 0.0]]]
    code, out = run(capsys, "iso-refute", a, a, "--kmax", "5")
    assert code == 0 and json.loads(out.out)["refuted"] is False
    write_matrix(files / "id3.mat", np.eye(3))
    assert run(capsys, "iso-check", a, a, "--witness", files / "id3.mat")[0] == 0
    assert run(capsys, "iso-check", a, b, "--witness", files / "id3.mat")[0] == 1


def test_usage_errors(files, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["equiv", "--level", "5", "x", "y"])
    assert exc.value.code == 2
    capsys.readouterr()
    assert run(capsys, "paths", files / "missing.pbs")[0] == 2
    bad = files / "bad.chan"
    bad.write_text("{not json")
    assert run(capsys, "equiv", "--level", "0", bad, bad)[0] == 2
