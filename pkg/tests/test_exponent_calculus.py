"""Tests for local exponents, kernels and monodromy characters."""

import pytest
from sympy import Rational

from exceptions import ValidationError
from services.exponent_calculus import (
    KernelForm,
    MonodromyCharacter,
    Singularity,
    case_exponents,
    character_of,
    ex2_delta,
    ex2_phi_exponents,
    frac,
    i_prime_kernel,
    integer_exponent_shortcut,
    omega_kernel,
    phi_representative,
    psi_prime_kernel,
    ve2_phi_exponents,
)


def test_frac_and_class_key():
    """Exponents are compared modulo integers."""
    assert frac(Rational(-1, 3)) == Rational(2, 3)
    assert frac(2) == 0
    first = KernelForm(Rational(-6, 5), Rational(-1, 2))
    second = KernelForm(Rational(-1, 5), Rational(1, 2))
    assert first.class_key == (Rational(4, 5), Rational(1, 2))
    assert first.same_class(second)
    assert not first.same_class(KernelForm(Rational(-4, 5), Rational(-1, 2)))


def test_case_exponents():
    """a = 1/2 + eps/(2k) and b from the Jordan case."""
    assert case_exponents(5, 1) == (Rational(3, 5), Rational(1, 4))
    assert case_exponents(5, 4) == (Rational(2, 5), Rational(3, 4))
    with pytest.raises(ValidationError):
        case_exponents(5, 7)


def test_omega_and_i_prime():
    """Kernels of omega and of 1/x1^2."""
    assert omega_kernel(3) == KernelForm(Rational(-5, 3), Rational(-5, 4))
    assert i_prime_kernel(3, 3) == KernelForm(Rational(-2, 3), Rational(-1, 2))
    assert i_prime_kernel(5, 1) == KernelForm(Rational(-6, 5), Rational(-1, 2))


def test_ve2_phi_exponents():
    """Phi' kernel for (gamma, alpha) cases."""
    assert ve2_phi_exponents(5, 1, 1) == KernelForm(Rational(1, 5), Rational(-1, 2))
    assert ve2_phi_exponents(3, 3, 3) == KernelForm(Rational(-2, 3), Rational(-1, 2))
    assert ve2_phi_exponents(5, 2, 3) == KernelForm(Rational(-1, 5), 0)


def test_ex2_phi_exponents():
    """Phi' kernel for three blocks; (2, 2, 4) has both exponents integral."""
    assert ex2_phi_exponents(5, 3, 3, 3) == KernelForm(Rational(-2, 5), Rational(-1, 2))
    assert ex2_phi_exponents(5, 2, 2, 4) == KernelForm(0, 1)


def test_integer_exponent_shortcut():
    """A certificate names the side with the integer exponent."""
    assert integer_exponent_shortcut(KernelForm(Rational(1, 3), Rational(-1, 2))) is None
    cert = integer_exponent_shortcut(KernelForm(Rational(1, 3), 0))
    assert cert.singularity is Singularity.ONE
    assert "z = 1" in cert.reason
    cert = integer_exponent_shortcut(KernelForm(-1, Rational(1, 2)))
    assert cert.singularity is Singularity.ZERO


def test_characters():
    """Characters multiply by adding exponents modulo 1."""
    chi = character_of(KernelForm(Rational(1, 3), Rational(1, 2)), Singularity.ZERO)
    assert chi == MonodromyCharacter(Rational(1, 3))
    assert (chi * MonodromyCharacter(Rational(2, 3))).is_trivial
    assert character_of(KernelForm(Rational(1, 3), Rational(1, 2)), 1).q == Rational(1, 2)


def test_ex2_delta_rows():
    """Delta for the sign patterns, as multiples of 1/k."""
    k = 5
    assert ex2_delta(1, 1, 1, k) == Rational(1, k)
    assert ex2_delta(-1, -1, -1, k) == Rational(-2, k)
    assert ex2_delta(-1, -1, 1, k) == Rational(1, k)
    assert ex2_delta(-1, 1, -1, k) == Rational(-3, k)
    assert ex2_delta(1, -1, -1, k) == Rational(-1, k)
    assert ex2_delta(-1, 1, -1, 3).is_Integer
    with pytest.raises(ValidationError):
        ex2_delta(0, 1, 1, k)


def test_phi_representative():
    """Shape of an algebraic Phi from the integrality of its exponents."""
    assert phi_representative(KernelForm(Rational(1, 3), 1)) == ("Q", KernelForm(Rational(4, 3), 0))
    assert phi_representative(KernelForm(0, Rational(1, 2))) == ("Q", KernelForm(0, Rational(3, 2)))
    assert phi_representative(KernelForm(Rational(1, 3), Rational(-1, 2))) == (
        "R",
        KernelForm(Rational(4, 3), Rational(1, 2)),
    )


def test_psi_prime_kernel():
    """Psi'_alpha for (gamma, alpha) = (3, 1) cancels the z exponent up to -1 - 1/k."""
    k = 5
    phi = ve2_phi_exponents(k, 3, 1)
    label, kernel = psi_prime_kernel(phi, k, 1)
    assert label == "Q"
    assert kernel == KernelForm(-1 - Rational(1, k), 0)
