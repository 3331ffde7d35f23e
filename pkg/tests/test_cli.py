import json
import shutil

import pytest

from plcsem.cli import main

from conftest import CORPUS


@pytest.fixture
def work(tmp_path, monkeypatch):
    for rel in ("ld/blink.ld.json", "il/latch.il", "props/no_b.json", "bad/unbound.il",
                "sfc/interlock.sfc.json", "sfc/interlock_buggy.sfc.json", "props/mutex.json"):
        shutil.copy(CORPUS / rel, tmp_path)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_translate_then_equiv(work, capsys):
    assert main(["translate", "blink.ld.json", "-o", "blink.il"]) == 0
    assert (work / "blink.il").read_text().splitlines()[-2:] == ["LD A", "ST B"]
    assert main(["equiv", "blink.ld.json", "blink.il", "--exhaustive"]) == 0
    assert "Equivalent (4 environments)" in capsys.readouterr().out


def test_equiv_mismatch(work, capsys):
    (work / "wrong.il").write_text("VAR_INPUT A : BOOL; END_VAR VAR_OUTPUT B : BOOL; END_VAR\nLD A\nSTN B\n")
    assert main(["equiv", "blink.ld.json", "wrong.il", "--json-out", "v.json"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("NotEquivalent")
    doc = json.loads((work / "v.json").read_text())
    assert doc["verdict"] == "NotEquivalent"
    assert doc["witness"] == {"A": False, "B": False}


def test_equiv_random_prints_seed(work, capsys):
    main(["translate", "blink.ld.json", "-o", "blink.il"])
    assert main(["equiv", "blink.ld.json", "blink.il", "--random", "50", "--seed", "9"]) == 0
    out = capsys.readouterr().out
    assert "seed: 9" in out and "Equivalent (50 environments)" in out


def test_check_latch_counterexample(work, capsys):
    assert main(["check", "latch.il", "--prop", "no_b.json", "--depth", "2", "--json-out", "v.json"]) == 1
    out = capsys.readouterr().out
    assert "Counterexample (1 cycles)" in out
    lines = out.splitlines()
    assert lines[1].split() == ["cycle", "A", "B"]
    assert lines[4].split() == ["1", "TRUE", "TRUE"]
    assert json.loads((work / "v.json").read_text())["cycles"] == 1


def test_check_holds_and_inductive(work, capsys):
    assert main(["check", "interlock.sfc.json", "--prop", "mutex.json", "--depth", "100"]) == 0
    assert main(["check", "interlock.sfc.json", "--prop", "mutex.json", "--inductive"]) == 0
    out = capsys.readouterr().out
    assert "HoldsWithinBound" in out and "Inductive" in out
    assert main(["check", "interlock_buggy.sfc.json", "--prop", "mutex.json", "--depth", "10"]) == 1
    assert main(["check", "latch.il", "--prop", "no_b.json", "--inductive"]) == 1


def test_parse_unbound_label(work, capsys):
    assert main(["parse", "unbound.il"]) == 2
    assert "UnboundLabel at line 2" in capsys.readouterr().err


def test_parse_pretty_prints(work, capsys):
    assert main(["parse", "latch.il"]) == 0
    assert capsys.readouterr().out.splitlines()[-2:] == ["LD A", "S B"]


def test_run(work, capsys):
    assert main(["run", "latch.il", "--inputs", "A=TRUE"]) == 0
    assert capsys.readouterr().out == "B=TRUE\n"
    assert main(["run", "latch.il"]) == 0
    assert capsys.readouterr().out == "B=FALSE\n"
    assert main(["run", "interlock.sfc.json", "--inputs", "reqA=1"]) == 0
    assert "active=WaitA,WaitB" in capsys.readouterr().out


def test_run_bad_inputs(work, capsys):
    assert main(["run", "latch.il", "--inputs", "B=TRUE"]) == 2
    assert main(["run", "latch.il", "--inputs", "A=7"]) == 2
    assert main(["run", "latch.il", "--inputs", "A"]) == 2


def test_simulate_inputs_file(work, capsys):
    (work / "in.json").write_text(json.dumps([{"A": False}, {"A": True}, {"A": False}]))
    assert main(["simulate", "latch.il", "--inputs-file", "in.json", "--json-out", "t.json"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert [r.split()[-1] for r in rows[2:]] == ["FALSE", "FALSE", "TRUE", "TRUE"]
    assert len(json.loads((work / "t.json").read_text())) == 4


def test_simulate_seeded_is_deterministic(work, capsys):
    main(["simulate", "interlock.sfc.json", "--cycles", "6", "--seed", "3"])
    first = capsys.readouterr().out
    main(["simulate", "interlock.sfc.json", "--cycles", "6", "--seed", "3"])
    assert capsys.readouterr().out == first
    assert first.startswith("seed: 3")


def test_unknown_extension(work, capsys):
    (work / "prog.txt").write_text("LD TRUE\n")
    assert main(["parse", "prog.txt"]) == 2
    assert main(["parse", "prog.txt", "--format", "il"]) == 0


def test_missing_file(work, capsys):
    assert main(["parse", "nope.il"]) == 2


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
