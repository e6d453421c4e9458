import json
import subprocess
import sys

import pytest

from conftest import GAMMA
from treefree.cli import bundled_presentation, run
from treefree.hnn import parse_presentation

GAMMA_ARGS = ["-p", "gamma.txt"]
CERT = json.dumps({"g": "x y^-1", "conjugators": ["1", "u^-1", "v^-1"]})


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv)
    return code, json.loads(out)


def test_bundled_gamma_matches():
    assert parse_presentation(bundled_presentation("gamma.txt")) == GAMMA
    assert bundled_presentation("nope.txt") is None


def test_reduce_roundtrip(capsys):
    code, out, _ = call(capsys, "reduce", "x x^-1 y z z", "--output", "plain")
    assert code == 0 and out.strip() == "y z^2"
    code, again, _ = call(capsys, "reduce", out.strip(), "--output", "plain")
    assert again == out
    code, data = call_json(capsys, "reduce", "x x^-1", "-p", "gamma.txt")
    assert data == {"word": "1"}


def test_tl(capsys):
    code, data = call_json(capsys, "tl", "z x y^-1 z^-1")
    assert code == 0 and data["translation_length"] == 2


def test_conj(capsys):
    assert call(capsys, "conj", "x y^-1", "y^-1 x")[0] == 0
    assert call(capsys, "conj", "x y^-1", "y z^-1")[0] == 1


def test_triv(capsys):
    code, data = call_json(capsys, "triv", *GAMMA_ARGS, "x y^-1 u x y^-1 u^-1 v x y^-1 v^-1")
    assert code == 0 and data["trivial"] and data["reduced"] == "1"
    code, data = call_json(capsys, "triv", *GAMMA_ARGS, "x y^-1")
    assert code == 1 and not data["trivial"]


def test_eq(capsys):
    assert call(capsys, "eq", *GAMMA_ARGS, "u x y^-1 u^-1", "y z^-1")[0] == 0
    assert call(capsys, "eq", *GAMMA_ARGS, "u", "v")[0] == 1


def test_check_freeness(capsys):
    code, data = call_json(capsys, "check-freeness", *GAMMA_ARGS)
    assert code == 0 and data["verdict"]
    assert len(data["classes"]) == 6 and all(len(c) == 1 for c in data["classes"])
    code, out, _ = call(capsys, "check-freeness", *GAMMA_ARGS, "--output", "plain")
    assert out.strip() == "verdict: true"


def test_check_freeness_failure(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("base: x y\nstable: u\nrel: u : x -> x y\n")
    code, data = call_json(capsys, "check-freeness", "-p", str(f))
    assert code == 1 and not data["verdict"] and data["failures"]


def test_verify_gt(capsys, tmp_path):
    assert call(capsys, "verify-gt", *GAMMA_ARGS, "--cert", CERT)[0] == 0
    f = tmp_path / "cert.json"
    f.write_text(CERT)
    code, data = call_json(capsys, "verify-gt", *GAMMA_ARGS, "--cert", str(f))
    assert code == 0 and data["valid"]
    bad = json.dumps({"g": "x y^-1", "conjugators": ["u"]})
    assert call(capsys, "verify-gt", *GAMMA_ARGS, "--cert", bad)[0] == 1


def test_search_gt(capsys):
    code, data = call_json(
        capsys, "search-gt", *GAMMA_ARGS, "-g", "x y^-1", "--max-factors", "3", "--max-conj-len", "1"
    )
    assert code == 0 and data["result"] == "found"
    cert = json.dumps(data["certificate"])
    assert call(capsys, "verify-gt", *GAMMA_ARGS, "--cert", cert)[0] == 0


def test_search_gt_none_and_budget(capsys):
    code, data = call_json(
        capsys, "search-gt", "-p", "free3.txt", "-g", "x", "--max-factors", "2", "--max-conj-len", "1"
    )
    assert code == 1 and data["result"] == "none"
    code, data = call_json(
        capsys, "search-gt", *GAMMA_ARGS, "-g", "x y^-1",
        "--max-factors", "3", "--max-conj-len", "1", "--budget", "10",
    )
    assert code == 3 and data["result"] == "budget-exhausted"


def test_order(capsys):
    code, data = call_json(capsys, "order", *GAMMA_ARGS, "--mode", "bi", "--radius", "2")
    assert code == 0 and data["verdict"] == "refuted" and data["ball_size"] == 101
    code, data = call_json(capsys, "order", *GAMMA_ARGS, "--mode", "left", "--radius", "1")
    assert code == 0 and data["verdict"] == "no-obstruction" and not data["conclusive"]
    code, data = call_json(
        capsys, "order", *GAMMA_ARGS, "--mode", "bi", "--radius", "2", "--budget", "100"
    )
    assert code == 3 and data["verdict"] == "budget-exhausted"


def test_json_is_deterministic(capsys):
    argv = ["order", *GAMMA_ARGS, "--mode", "bi", "--radius", "2"]
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


@pytest.mark.parametrize(
    "argv",
    [
        ["triv", "-p", "gamma.txt", "w"],
        ["triv", "-p", "missing.txt", "x"],
        ["order", "-p", "gamma.txt", "--mode", "up", "--radius", "1"],
        ["order", "-p", "gamma.txt", "--mode", "bi", "--radius", "-1"],
        ["search-gt", "-p", "gamma.txt", "-g", "x", "--max-factors", "0", "--max-conj-len", "1"],
        ["verify-gt", "-p", "gamma.txt", "--cert", "{broken"],
        ["reduce", "x^0"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "treefree", "reduce", "x x^-1", "--output", "plain"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "1"
