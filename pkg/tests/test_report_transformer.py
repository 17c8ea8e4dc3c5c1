"""Tests for the report transformer."""

import json

import mpmath as mp
from sympy import Rational

from services.numeric_oracle import NumericValue
from services.spectrum_classifier import classify_eigenvalue
from services.tables_service import build_table, diff_table, ex2_census
from transformers.report_transformer import SCHEMA, ReportTransformer


def test_render_rational():
    """Rationals always carry a denominator."""
    assert ReportTransformer.render_rational(Rational(1, 3)) == "1/3"
    assert ReportTransformer.render_rational(Rational(-1, 3)) == "-1/3"
    assert ReportTransformer.render_rational(2) == "2/1"


def test_render_values():
    """Nested containers, enums and numeric values become JSON values."""
    rendered = ReportTransformer.render({"q": Rational(7, 600), "pair": (Rational(1, 2), 3), "flag": True})
    assert rendered == {"q": "7/600", "pair": ["1/2", 3], "flag": True}

    numeric = ReportTransformer.render(NumericValue(mp.mpf(1) / 4, 128, mp.mpf(10) ** -30))
    assert numeric["value"] == "0.25"
    assert numeric["bits"] == 128
    assert numeric["rigor"] == "numeric"


def test_remove_nulls():
    """Nulls and empty containers are dropped recursively."""
    data = {"a": None, "b": [], "c": {"d": None, "e": 1}, "f": [1, None, 2]}
    assert ReportTransformer._remove_nulls(data) == {"c": {"e": 1}, "f": [1, 2]}


def test_transform_class():
    """Line-2 classification payload."""
    payload = ReportTransformer.transform_class(classify_eigenvalue(3, 1))
    assert payload["line"] == "Line2"
    assert payload["p"] == 1
    assert payload["case"] == 1
    assert payload["lambda"] == "1/1"
    assert payload["a"] == "2/3"
    assert "conflict" not in payload
    assert "finite_line" not in payload


def test_transform_report(service):
    """Report payload carries the schema, the status and a certificate."""
    report = service.analyze_ve2(5, 0, 0)
    payload = ReportTransformer.transform_report(report)
    assert payload["schema"] == SCHEMA
    assert payload["system"] == "VE2"
    assert payload["status"] == "ObstructedExact"
    assert payload["rigor"] == "exact"
    assert payload["eigenvalues"] == {"gamma": "0/1", "alpha": "0/1"}
    assert payload["phi"]["algebraic"] is False
    assert payload["certificate"][0]["step"] == "phi"
    assert "letter" not in payload
    json.loads(ReportTransformer.to_json(payload))


def test_to_json_is_stable():
    """Keys are sorted and the output is identical across calls."""
    text = ReportTransformer.to_json({"b": 1, "a": {"d": 2, "c": "λ"}})
    assert text == ReportTransformer.to_json({"a": {"c": "λ", "d": 2}, "b": 1})
    assert text.index('"a"') < text.index('"b"')
    assert "λ" in text


def test_transform_table_and_census():
    """Table and census payloads."""
    payload = ReportTransformer.transform_table("Idep", 5, build_table("Idep", 5), diff_table("Idep", 5))
    assert payload["matches"] is True
    assert payload["rows"][0] == [{"label": "?"}, {"label": "?"}, {"label": "Ind"}, {"label": "Ind"}]

    census = ReportTransformer.transform_census(ex2_census(3))
    assert census["counts"]["both"] == 12
    assert [2, 2, 4] in census["both_integer"]
    row = next(r for r in census["delta_rows"] if r["row"] == "L6")
    assert row == {"row": "L6", "signs": [-1, 1, -1], "delta": "-1/1", "integer": True}


def test_to_csv():
    """Header in column order, nested values JSON-encoded."""
    rows = [{"index": 0, "p": [1, 2], "status": "ObstructedExact", "extra": "ignored"}]
    text = ReportTransformer.to_csv(rows, ["index", "p", "status"])
    lines = text.splitlines()
    assert lines[0] == "index,p,status"
    assert lines[1] == '0,"[1, 2]",ObstructedExact'
