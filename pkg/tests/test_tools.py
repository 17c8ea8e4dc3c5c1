"""Tests for the MCP tool functions."""

import pytest

import tools.analysis as analysis
import tools.tables as tables


def _call(tool, **kwargs):
    # fastmcp wraps decorated functions in a tool object exposing the original as .fn
    return getattr(tool, "fn", tool)(**kwargs)


def test_classify_eigenvalue_tool():
    """Successful classification payload."""
    result = _call(analysis.classify_eigenvalue, k=3, lam="1")
    assert result["status"] == "success"
    assert result["classification"]["p"] == 1


def test_classify_eigenvalue_tool_validation():
    """Bad eigenvalues come back as error payloads."""
    result = _call(analysis.classify_eigenvalue, k=3, lam="one")
    assert result["status"] == "error"
    assert result["field"] == "lambda"


def test_analyze_ve2_tool():
    """Finite-line blocks by eigenvalue."""
    result = _call(analysis.analyze_ve2, k=3, lambda_gamma="1/8", lambda_alpha="1/8")
    assert result["status"] == "success"
    assert result["report"]["status"] == "VirtuallyAbelian"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"k": 5, "lambda_alpha": "1"},
        {"k": 5, "lambda_gamma": "1", "p_gamma": 0, "lambda_alpha": "1"},
    ],
)
def test_analyze_ve2_tool_needs_one_value_per_block(kwargs):
    """Exactly one of the eigenvalue or p per block."""
    result = _call(analysis.analyze_ve2, **kwargs)
    assert result["status"] == "error"
    assert result["field"] == "gamma"


def test_analyze_ex2_tool():
    """Finite-line triple."""
    result = _call(analysis.analyze_ex2, k=3, lambda_gamma="1/8", lambda_beta="1/8", lambda_alpha="1/8")
    assert result["status"] == "success"
    assert result["report"]["system"] == "EX2"


def test_reproduce_table_tool():
    """Table payload and unknown table names."""
    result = _call(tables.reproduce_table, which="phialg", k=5)
    assert result["status"] == "success"
    assert result["table"]["matches"] is True

    result = _call(tables.reproduce_table, which="phi", k=5)
    assert result["status"] == "error"
    assert result["field"] == "which"


def test_ex2_census_tool():
    """Census payload and small degrees."""
    result = _call(tables.ex2_census, k=5)
    assert result["census"]["counts"]["both"] == 12
    assert _call(tables.ex2_census, k=2)["status"] == "error"
