"""Tests for exception module."""

from exceptions import (
    DomainError,
    ExponentSumInteger,
    OutOfScope,
    PrecisionNotReached,
    Underdetermined,
    ValidationError,
    VeilError,
)


def test_veil_error():
    """Test base VeilError."""
    error = VeilError("Test error", details={"key": "value"})
    assert str(error) == "Test error (Details: {'key': 'value'})"
    assert error.exit_code == 2
    assert error.details == {"key": "value"}

    error_no_details = VeilError("Simple error")
    assert str(error_no_details) == "Simple error"


def test_validation_error():
    """Test ValidationError keeps the offending field and value."""
    error = ValidationError("lambda", 0.5, "expected an exact rational")
    assert error.field == "lambda"
    assert error.value == 0.5
    assert "Validation failed for lambda" in str(error)


def test_domain_error():
    """Test DomainError for small degrees."""
    error = DomainError(2)
    assert error.k == 2
    assert "k=2" in str(error)
    assert error.exit_code == 2


def test_exponent_sum_integer():
    """Test ExponentSumInteger records both exponents."""
    error = ExponentSumInteger(1, 2)
    assert error.details == {"e0": "1", "e1": "2"}


def test_precision_not_reached():
    """Test PrecisionNotReached."""
    error = PrecisionNotReached(best=None, bound="1e-10")
    assert error.bound == "1e-10"
    assert "precision" in str(error)


def test_subclasses_share_the_base():
    """Every engine error is a VeilError."""
    for error in (Underdetermined("x"), OutOfScope("y"), DomainError(1)):
        assert isinstance(error, VeilError)
