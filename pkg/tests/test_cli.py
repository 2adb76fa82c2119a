import random
import subprocess
import sys

import pytest

from conftest import THREE_STATE_TEXT
from fairltl.cli import EXIT_ERROR, EXIT_HOLDS, EXIT_NOT_FAIR, EXIT_VIOLATED, main
from fairltl.ltl import eval_lasso, parse, parse_pnf
from fairltl.sampling import random_lasso

THREE_STATE_NEG = "!(F G (a | (F b & G c)))"


@pytest.fixture
def model(tmp_path):
    p = tmp_path / "three_state.kripke"
    p.write_text(THREE_STATE_TEXT)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_violated_with_witness(capsys, model):
    code, out, _ = run(capsys, "check", "--model", model, "--formula", THREE_STATE_NEG, "--witness")
    assert code == EXIT_VIOLATED
    assert out.splitlines() == ["violated", "prefix: ; loop: s0", "trace: ( {a} )^w"]


def test_check_holds(capsys, model):
    code, out, _ = run(capsys, "check", "--model", model, "--formula", "G F a")
    assert code == EXIT_HOLDS and out == "holds\n"


def test_check_general_fairness(capsys, model):
    code, out, _ = run(capsys, "check", "--model", model,
                       "--formula", "!(F G (a | (X (b U c) & F !b)))")
    assert code == EXIT_VIOLATED and out.startswith("violated")


def test_check_rejects_non_fairness(capsys, model):
    code, _, err = run(capsys, "check", "--model", model, "--formula", "a U b")
    assert code == EXIT_NOT_FAIR and "error" in err


def test_check_screen_can_be_skipped(capsys, model):
    code, _, err = run(capsys, "check", "--model", model, "--formula", "G F a",
                       "--screen-samples", "0")
    assert code == EXIT_HOLDS and "warning" in err


@pytest.mark.parametrize("engine", ["fair", "classic", "auto"])
def test_engines_agree(capsys, model, engine):
    code, _, _ = run(capsys, "check", "--model", model, "--formula", THREE_STATE_NEG, "--engine", engine)
    assert code == EXIT_VIOLATED


@pytest.mark.parametrize("engine", ["fair", "classic"])
def test_check_under_assumption(capsys, model, engine):
    code, _, _ = run(capsys, "check", "--model", model, "--formula", "F G a",
                     "--fairness", "F G !c", "--engine", engine)
    assert code == EXIT_HOLDS
    code, _, _ = run(capsys, "check", "--model", model, "--formula", "F G a",
                     "--fairness", "G F c", "--engine", engine)
    assert code == EXIT_VIOLATED


@pytest.mark.parametrize("argv", [
    ["check", "--model", "MODEL", "--formula", "a &"],
    ["check", "--model", "/nonexistent/file", "--formula", "G F a"],
    ["check", "--model", "MODEL"],
    ["frobnicate"],
])
def test_errors_exit_two(capsys, model, argv):
    argv = [model if x == "MODEL" else x for x in argv]
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    capsys.readouterr()
    assert code == EXIT_ERROR


def test_bad_model_text(capsys, tmp_path):
    p = tmp_path / "bad.kripke"
    p.write_text("states: s t\ninit: s\ntrans: s->t\n")
    code, _, err = run(capsys, "check", "--model", str(p), "--formula", "G F a")
    assert code == EXIT_ERROR and "model" in err


def test_transform_fg(capsys):
    code, out, _ = run(capsys, "transform", "--formula", "F G (a | (F b & G c))")
    assert code == 0 and out.strip() == "(F G a) | ((F G c) & (G F b))"


@pytest.mark.parametrize("text", ["F G (a | (F b & G c))", "F G (a | X (b U c))", "G F (a U b)"])
def test_transform_output_reparses_equivalently(capsys, text):
    general = "U" in text or "X" in text
    argv = ["transform", "--formula", text] + (["--general"] if general else [])
    code, out, _ = run(capsys, *argv)
    assert code == 0
    again = parse(out.strip())
    phi = parse_pnf(text)
    rng = random.Random(7)
    for _ in range(200):
        w = random_lasso(rng)
        assert eval_lasso(w, again) == eval_lasso(w, phi)


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--formula", "a U b")
    assert code == 0
    assert out.strip() == "fragment=LTL(U,X) fast=PhiF fairness=ConfirmedNot"


def test_bench_csv(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "bench", "--suite", "pd", "--n", "2", "--patterns", "p1,p2",
                     "--out", str(out), "--budget-ms", "30000")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("family,n,pattern,engine,verdict")
    assert len(lines) == 5


def test_bench_stdout(capsys):
    code, out, _ = run(capsys, "bench", "--suite", "bs", "--n", "2", "--patterns", "p1",
                       "--engines", "fair", "--out", "-")
    assert code == 0 and out.splitlines()[1].startswith("BS,2,p1,fair,")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fairltl.cli", "classify", "--formula", "G F a"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "fragment=LTL(F,G)" in proc.stdout
