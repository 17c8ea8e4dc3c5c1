"""Tests for the command line entry point."""

import json

import pytest

from cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_classify(capsys):
    """k = 3, lambda = 1 is line 2 with p = 1 in case 1."""
    code, out = _run(capsys, ["classify", "--k", "3", "--lambda", "1"])
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["schema"] == "veil/1"
    assert payload["classification"]["line"] == "Line2"
    assert payload["classification"]["p"] == 1
    assert payload["classification"]["case"] == 1


def test_classify_by_parameter(capsys):
    """--p is turned into its eigenvalue."""
    code, out = _run(capsys, ["classify", "--k", "5", "--p=-2"])
    assert code == EXIT_OK
    assert json.loads(out)["classification"]["lambda"] == "13/1"


def test_small_degree_is_out_of_scope(capsys):
    """|k| < 3 exits with 2 and an OutOfScope document."""
    code, out = _run(capsys, ["classify", "--k", "2", "--lambda", "1"])
    assert code == EXIT_USAGE
    assert json.loads(out)["status"] == "OutOfScope"


def test_usage_errors(capsys):
    """Missing arguments exit with 2."""
    assert main(["classify", "--lambda", "1"]) == EXIT_USAGE
    assert main(["classify", "--k", "3"]) == EXIT_USAGE
    capsys.readouterr()


def test_ve2_finite_blocks(capsys):
    """Two finite-line blocks are virtually Abelian."""
    code, out = _run(capsys, ["ve2", "--k", "3", "--lambda", "1/8", "1/8"])
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "VirtuallyAbelian"


def test_ve2_by_parameters(capsys):
    """Per-index line-2 parameters instead of eigenvalues."""
    code, out = _run(capsys, ["ve2", "--k", "5", "--p-gamma", "0", "--p-alpha", "0", "--bits", "128"])
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["status"] == "ObstructedExact"
    assert payload["classes"]["gamma"]["case"] == 3


def test_ex2_finite_blocks(capsys, tmp_path):
    """EX2 report written with --out."""
    target = tmp_path / "ex2.json"
    code, out = _run(capsys, ["ex2", "--k", "3", "--lambda", "1/8", "1/8", "1/8", "--out", str(target)])
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["status"] == "VirtuallyAbelian"


@pytest.mark.parametrize("which", ["I", "phialg", "psialpha", "psigamma", "Idep"])
def test_tables(capsys, which):
    """Every table regenerates without mismatches."""
    code, out = _run(capsys, ["tables", "--which", which, "--k", "7"])
    assert code == EXIT_OK
    assert json.loads(out)["matches"] is True


def test_census(capsys):
    """Census counts for k = 5."""
    code, out = _run(capsys, ["census", "--k", "5"])
    assert code == EXIT_OK
    counts = json.loads(out)["counts"]
    assert counts["E0_int"] == 24
    assert counts["all_algebraic"] == 16


def test_sweep_empty_range(capsys):
    """An empty interval produces a document with no rows."""
    code, out = _run(capsys, ["sweep", "--k", "5", "--p-range=1..0", "--bits", "128"])
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["rows"] == []
    assert payload["p_range"] == [1, 0]


def test_sweep_csv(capsys):
    """CSV rows on stdout, summary on stderr."""
    code = main(["sweep", "--k", "5", "--p-range=1..1", "--bits", "128", "--format", "csv", "--jobs", "1"])
    captured = capsys.readouterr()
    assert code == EXIT_OK
    lines = captured.out.strip().splitlines()
    assert lines[0] == "index,p,cases,letter,status,rigor,reason"
    assert len(lines) == 2
    assert '"cells": 1' in captured.err


def test_exit_codes_are_distinct():
    """Mismatch and usage codes differ."""
    assert EXIT_MISMATCH == 1
    assert EXIT_USAGE == 2
