"""Tests for table regeneration and the EX2 census."""

import pytest
from sympy import Rational

from exceptions import DomainError, ValidationError
from services.tables_service import TABLES, build_table, diff_table, ex2_census, expected_table


@pytest.mark.parametrize("k", [3, -3, 4, 5, 7, -7, 11])
@pytest.mark.parametrize("which", TABLES)
def test_tables_match_fixtures(which, k):
    """Regenerated tables agree with the bundled values cell for cell."""
    assert diff_table(which, k) == []


def test_table_shapes():
    """The I' table is one row; the others are 4 x 4."""
    assert len(build_table("I", 5)) == 1
    assert len(build_table("I", 5)[0]) == 4
    for which in ("phialg", "psialpha", "psigamma", "Idep"):
        rows = build_table(which, 5)
        assert len(rows) == 4
        assert all(len(row) == 4 for row in rows)


def test_phialg_cells():
    """Ten cells have an integer Phi exponent whatever p is."""
    rows = build_table("phialg", 7)
    assert sum(cell.label == "alg" for row in rows for cell in row) == 10
    assert rows[0][0].e0 == Rational(1, 7)
    assert rows[0][0].e1 == Rational(-1, 2)


def test_idep_cells():
    """Eight cells are independent by characters, the other eight undecided."""
    labels = [cell.label for row in build_table("Idep", 5) for cell in row]
    assert labels.count("Ind") == 8
    assert labels.count("?") == 8


def test_expected_table_values():
    """Fixture cells are evaluated at k."""
    (row,) = expected_table("I", 3)
    assert row[0].e0 == Rational(-4, 3)
    assert row[2].e0 == Rational(-2, 3)
    assert row[1].e1 == Rational(-3, 2)


def test_table_errors():
    """Unknown names and small degrees are refused."""
    with pytest.raises(ValidationError):
        build_table("phi", 5)
    with pytest.raises(DomainError):
        build_table("I", 2)


def test_ex2_census_counts():
    """Counts of integer exponents over the 64 case triples."""
    record = ex2_census(5)
    assert record.counts == {
        "E0_int": 24,
        "E1_int": 32,
        "both": 12,
        "algebraic_by_exponent": 44,
        "possibly_transcendental": 20,
        "all_algebraic": 16,
    }
    assert len(record.both_integer) == 12
    for triple in ((2, 2, 4), (2, 4, 2), (4, 2, 2)):
        assert triple in record.both_integer


@pytest.mark.parametrize("k, integral", [(3, True), (-3, True), (5, False), (7, False)])
def test_census_delta_rows(k, integral):
    """The (-, +, -) row gives -3/k, an integer only for |k| = 3."""
    rows = {row["row"]: row for row in ex2_census(k).delta_rows}
    assert rows["L6"]["delta"] == Rational(-3, k)
    assert rows["L6"]["integer"] is integral
    assert rows["L0"]["delta"] == Rational(1, k)
    assert rows["L4"]["delta"] == Rational(-2, k)
    assert not rows["L0"]["integer"]
