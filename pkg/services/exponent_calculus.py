"""Local exponents of the integrands: solutions, kernels, monodromy characters and the integer-exponent shortcut."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Tuple

from sympy import Rational, floor

from exceptions import ValidationError
from services.spectrum_classifier import SpectralClass, _JORDAN_ROWS
from utils.logging import get_logger

logger = get_logger(__name__)

ONE = Rational(1)


class Singularity(int, Enum):
    ZERO = 0
    ONE = 1


def is_integer(q: Rational) -> bool:
    return Rational(q).is_Integer


def frac(q: Any) -> Rational:
    """q mod 1 in [0, 1)."""
    q = Rational(q)
    return q - floor(q)


@dataclass(frozen=True)
class KernelForm:
    """Algebraic kernel z^e0 (1 - z)^e1."""

    e0: Rational
    e1: Rational

    def __post_init__(self):
        object.__setattr__(self, "e0", Rational(self.e0))
        object.__setattr__(self, "e1", Rational(self.e1))

    def __add__(self, other: "KernelForm") -> "KernelForm":
        return KernelForm(self.e0 + other.e0, self.e1 + other.e1)

    def __sub__(self, other: "KernelForm") -> "KernelForm":
        return KernelForm(self.e0 - other.e0, self.e1 - other.e1)

    def shift(self, d0: Any = 0, d1: Any = 0) -> "KernelForm":
        return KernelForm(self.e0 + d0, self.e1 + d1)

    @property
    def exponent_sum(self) -> Rational:
        return self.e0 + self.e1

    @property
    def has_integer_exponent(self) -> bool:
        return is_integer(self.e0) or is_integer(self.e1)

    @property
    def class_key(self) -> Tuple[Rational, Rational]:
        """Monodromy class: both exponents mod 1."""
        return frac(self.e0), frac(self.e1)

    def same_class(self, other: "KernelForm") -> bool:
        return self.class_key == other.class_key

    def as_expr(self, var):
        return var**self.e0 * (1 - var) ** self.e1


@dataclass(frozen=True)
class MonodromyCharacter:
    """Character exp(2 pi i q) stored as q mod 1."""

    q: Rational

    def __post_init__(self):
        object.__setattr__(self, "q", frac(self.q))

    def __mul__(self, other: "MonodromyCharacter") -> "MonodromyCharacter":
        return MonodromyCharacter(self.q + other.q)

    @property
    def is_trivial(self) -> bool:
        return self.q == 0


@dataclass(frozen=True)
class AlgebraicByMonodromy:
    """Certificate that a primitive is algebraic because one local monodromy is trivial."""

    kernel: KernelForm
    singularity: Singularity

    @property
    def reason(self) -> str:
        side = "z = 0" if self.singularity is Singularity.ZERO else "z = 1"
        return f"integer exponent at {side}: the monodromy group is generated by one non-trivial loop"


def _require_line2(cls: SpectralClass) -> None:
    if not cls.is_line2:
        raise ValidationError("cls", cls.line.value, "exponents are defined for line-2 eigenvalues only")


def case_exponents(k: int, jcase: int) -> Tuple[Rational, Rational]:
    """(a, b) for a Jordan case: a = 1/2 + eps/(2k)."""
    if jcase not in _JORDAN_ROWS:
        raise ValidationError("jcase", jcase, "case must be 1, 2, 3 or 4")
    eps, b, _, _ = _JORDAN_ROWS[jcase]
    return Rational(1, 2) + Rational(eps, 2 * k), b


def case_sign(jcase: int) -> int:
    return _JORDAN_ROWS[jcase][0]


def solution_exponents(cls: SpectralClass) -> Tuple[Rational, Rational]:
    """Exponents (a, b) of the algebraic solution z^a (z - 1)^b J(z)."""
    _require_line2(cls)
    return cls.a, cls.b


def omega_kernel(k: int) -> KernelForm:
    """omega = z^-(3/2 + 1/(2k)) (1 - z)^-5/4."""
    return KernelForm(-(Rational(3, 2) + Rational(1, 2 * k)), Rational(-5, 4))


def i_prime_kernel(k: int, jcase: int) -> KernelForm:
    """Kernel of I' = 1 / (x1^2): exponents (-2a, -2b), the J^-2 factor kept apart."""
    a, b = case_exponents(k, jcase)
    return KernelForm(-2 * a, -2 * b)


def ve2_phi_exponents(k: int, jcase_gamma: int, jcase_alpha: int) -> KernelForm:
    """Kernel of Phi' = omega y1 x1^2 = z^E0 (1 - z)^E1 J_gamma J_alpha^2."""
    a_g, b_g = case_exponents(k, jcase_gamma)
    a_a, b_a = case_exponents(k, jcase_alpha)
    w = omega_kernel(k)
    return KernelForm(a_g + 2 * a_a + w.e0, b_g + 2 * b_a + w.e1)


def ex2_phi_exponents(k: int, jcase_gamma: int, jcase_beta: int, jcase_alpha: int) -> KernelForm:
    """Kernel of Phi' = omega y1 x1 w1 = z^E0 (1 - z)^E1 J_gamma J_beta J_alpha."""
    w = omega_kernel(k)
    e0, e1 = w.e0, w.e1
    for jcase in (jcase_gamma, jcase_beta, jcase_alpha):
        a, b = case_exponents(k, jcase)
        e0 += a
        e1 += b
    return KernelForm(e0, e1)


def integer_exponent_shortcut(kf: KernelForm) -> Optional[AlgebraicByMonodromy]:
    """Certificate when e0 or e1 is an integer, None otherwise."""
    if is_integer(kf.e1):
        return AlgebraicByMonodromy(kf, Singularity.ONE)
    if is_integer(kf.e0):
        return AlgebraicByMonodromy(kf, Singularity.ZERO)
    return None


def character_of(kf: KernelForm, at: Singularity | int) -> MonodromyCharacter:
    """Local monodromy character of a primitive with derivative kernel kf."""
    return MonodromyCharacter(kf.e0 if Singularity(at) is Singularity.ZERO else kf.e1)


def ex2_delta(eps_h: int, eps_i: int, eps_j: int, k: int) -> Rational:
    """E0 - 2 a_i + 2 a_j for the ambient triple (h, i, j).

    Arguments follow the (gamma, beta, alpha) row order: (eps_h, eps_i, eps_j).
    """
    for sign in (eps_h, eps_i, eps_j):
        if sign not in (1, -1):
            raise ValidationError("eps", sign, "sign must be +1 or -1")
    return Rational(eps_h - eps_i + 3 * eps_j - 1, 2 * k)


def phi_representative(kf: KernelForm) -> Tuple[str, KernelForm]:
    """Shape of an algebraic Phi: the exponents of its z / (1 - z) prefactor and the label of the cofactor.

    E1 integer: Phi = z^(E0+1) Q.  E0 integer: Phi = (1 - z)^(E1+1) Q.  Otherwise z^(E0+1) (1 - z)^(E1+1) R.
    """
    if is_integer(kf.e1):
        return "Q", KernelForm(kf.e0 + 1, 0)
    if is_integer(kf.e0):
        return "Q", KernelForm(0, kf.e1 + 1)
    return "R", KernelForm(kf.e0 + 1, kf.e1 + 1)


def psi_prime_kernel(phi: KernelForm, k: int, jcase_nu: int) -> Tuple[str, KernelForm]:
    """Exponents of Psi'_nu = Phi I'_nu for an algebraic Phi with derivative kernel phi."""
    label, prefactor = phi_representative(phi)
    return label, prefactor + i_prime_kernel(k, jcase_nu)
