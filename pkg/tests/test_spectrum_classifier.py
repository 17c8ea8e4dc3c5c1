"""Tests for eigenvalue classification."""

import pytest
from sympy import Rational

from exceptions import DomainError, ValidationError
from services.spectrum_classifier import (
    TableLine,
    as_rational,
    classify_eigenvalue,
    classify_parameter,
    family_value,
    jacobi_degree,
    jordan_case,
    lambda_of,
    line2_parameter,
)


@pytest.mark.parametrize("k", [3, -3, 4, -4, 5, -5, 7, -7])
def test_line2_round_trip(k):
    """Every integer p is recovered from its own eigenvalue."""
    for p in range(-20, 21):
        cls = classify_eigenvalue(k, lambda_of(k, p))
        assert cls.line is TableLine.LINE2
        assert cls.p == p
        assert cls.jcase == jordan_case(p)
        assert cls.tau_consistent()


def test_lambda_of_values():
    """Eigenvalues of the additive-group family for k = 5."""
    assert lambda_of(5, 3) == 18
    assert lambda_of(5, 2) == 7
    assert lambda_of(5, -2) == 13
    assert lambda_of(5, 1) == 1
    assert lambda_of(3, 0) == 0


def test_line2_parameter_rejects_off_line():
    """No integer root off the line."""
    assert line2_parameter(5, Rational(1, 2)) is None
    assert line2_parameter(3, Rational(1)) == 1


def test_jordan_cases_and_degrees():
    """Case and Jacobi degree for representative parameters."""
    expected = {3: (1, 1), 1: (1, 0), 2: (2, 0), 4: (2, 1), 0: (3, 0), -2: (3, 1), -1: (4, 0), -3: (4, 1)}
    for p, (jcase, n) in expected.items():
        assert jordan_case(p) == jcase
        assert jacobi_degree(jcase, p) == n


def test_classify_line2_exponents():
    """k = 3, lambda = 1 sits on line 2 with p = 1 and no finite-line conflict."""
    cls = classify_eigenvalue(3, 1)
    assert cls.is_line2
    assert cls.p == 1
    assert cls.jcase == 1
    assert cls.a == Rational(1, 2) + Rational(1, 6)
    assert cls.b == Rational(1, 4)
    assert cls.alpha == Rational(-1, 2)
    assert cls.beta == Rational(1, 3)
    assert cls.n == 0
    assert cls.eps == 1
    assert not cls.conflict
    assert cls.tau == Rational(1, 2) + Rational(1, 3)


def test_classify_finite_line():
    """k = 3, lambda = 1/8 is the first family at p = 0."""
    cls = classify_eigenvalue(3, "1/8")
    assert cls.is_finite
    assert cls.finite_line == 8
    assert cls.finite_p == 0
    assert cls.p is None
    assert family_value(8, 3, 0) == Rational(1, 8)


def test_classify_not_in_table():
    """k = 5, lambda = 1/2 matches nothing."""
    cls = classify_eigenvalue(5, Rational(1, 2))
    assert cls.line is TableLine.NOT_IN_TABLE
    assert cls.p is None
    assert cls.finite_line is None


def test_classify_parameter_matches_lambda():
    """classify_parameter is classify_eigenvalue of lambda_of."""
    assert classify_parameter(5, -2) == classify_eigenvalue(5, 13)


def test_degree_out_of_scope():
    """|k| <= 2 raises DomainError."""
    for k in (-2, -1, 0, 1, 2):
        with pytest.raises(DomainError):
            classify_eigenvalue(k, 1)


def test_non_integer_degree():
    """k must be an int."""
    with pytest.raises(ValidationError):
        classify_eigenvalue(3.0, 1)


def test_as_rational():
    """Strings and ints parse, floats are refused."""
    assert as_rational("-1/24") == Rational(-1, 24)
    assert as_rational(7) == 7
    with pytest.raises(ValidationError):
        as_rational(0.125)
    with pytest.raises(ValidationError):
        as_rational("one eighth")


def test_family_value_unknown_line():
    """Lines that do not apply to k are rejected."""
    with pytest.raises(ValidationError):
        family_value(16, 3, 0)
