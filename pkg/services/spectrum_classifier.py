"""Classification of an eigenvalue of V''(c) against the Morales-Ramis table and the four Jordan cases."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, Optional, Tuple

from sympy import Integer, Rational, ceiling, sqrt
from sympy.core.sympify import SympifyError

from exceptions import DomainError, ValidationError
from utils.logging import get_logger

logger = get_logger(__name__)


class TableLine(str, Enum):
    LINE2 = "Line2"
    FINITE = "Finite"
    NOT_IN_TABLE = "NotInTable"


# Finite-group families lambda = c + s * (u + v p)^2, keyed by |k|.
FINITE_FAMILIES = {
    3: (
        (8, Rational(-1, 24), Rational(1, 6), 1, 3),
        (9, Rational(-1, 24), Rational(3, 32), 1, 4),
        (10, Rational(-1, 24), Rational(3, 50), 1, 5),
        (11, Rational(-1, 24), Rational(3, 50), 2, 5),
        (12, Rational(25, 24), Rational(-1, 6), 1, 3),
        (13, Rational(25, 24), Rational(-3, 32), 1, 4),
        (14, Rational(25, 24), Rational(-3, 50), 1, 5),
        (15, Rational(25, 24), Rational(-3, 50), 2, 5),
    ),
    4: (
        (16, Rational(-1, 8), Rational(2, 9), 1, 3),
        (17, Rational(9, 8), Rational(-2, 9), 1, 3),
    ),
    5: (
        (18, Rational(-9, 40), Rational(5, 18), 1, 3),
        (19, Rational(-9, 40), Rational(1, 10), 2, 5),
        (20, Rational(49, 40), Rational(-5, 18), 1, 3),
        (21, Rational(49, 40), Rational(-1, 10), 2, 5),
    ),
}

# case -> (eps, b, alpha, sign of beta * k)
_JORDAN_ROWS = {
    1: (1, Rational(1, 4), Rational(-1, 2), 1),
    2: (1, Rational(3, 4), Rational(1, 2), 1),
    3: (-1, Rational(1, 4), Rational(-1, 2), -1),
    4: (-1, Rational(3, 4), Rational(1, 2), -1),
}


@dataclass(frozen=True)
class SpectralClass:
    """Full classification of one eigenvalue.

    For Line2 eigenvalues every Jordan field is populated; for finite lines only
    ``finite_line``/``finite_p`` are, and NotInTable carries nothing beyond (k, lam).
    """

    k: int
    lam: Rational
    line: TableLine
    p: Optional[int] = None
    jcase: Optional[int] = None
    a: Optional[Rational] = None
    b: Optional[Rational] = None
    alpha: Optional[Rational] = None
    beta: Optional[Rational] = None
    n: Optional[int] = None
    eps: Optional[int] = None
    finite_line: Optional[int] = None
    finite_p: Optional[int] = None
    conflict: bool = False

    @property
    def is_line2(self) -> bool:
        return self.line is TableLine.LINE2

    @property
    def is_finite(self) -> bool:
        return self.line is TableLine.FINITE

    @property
    def tau(self) -> Optional[Rational]:
        """tau = p - 1/2 + 1/k, the exponent difference at infinity."""
        if self.p is None:
            return None
        return self.p - Rational(1, 2) + Rational(1, self.k)

    def tau_consistent(self) -> bool:
        if self.p is None:
            return False
        k, p = self.k, self.p
        return Integer(2 * k * p - k + 2) ** 2 == Integer(k - 2) ** 2 + 8 * k * self.lam


def _check_degree(k: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValidationError("k", k, "degree must be an integer")
    if abs(k) < 3:
        raise DomainError(k)


def as_rational(value: Any, field: str = "lambda") -> Rational:
    """Parse an exact rational from an int, a Rational or a string such as "7/8"."""
    if isinstance(value, float):
        raise ValidationError(field, value, "floating point values are not exact; pass a string like '1/8'")
    try:
        result = Rational(value)
    except (TypeError, ValueError, SympifyError):
        raise ValidationError(field, value, "expected an exact rational") from None
    return result


def jordan_case(p: int) -> int:
    """Case 1: odd p >= 1; case 2: even p >= 2; case 3: even p <= 0; case 4: odd p <= -1."""
    if p >= 1:
        return 1 if p % 2 == 1 else 2
    return 3 if p % 2 == 0 else 4


def jacobi_degree(jcase: int, p: int) -> int:
    if jcase == 1:
        return (p - 1) // 2
    if jcase == 2:
        return p // 2 - 1
    if jcase == 3:
        return -p // 2
    return (-p - 1) // 2


def lambda_of(k: int, p: int) -> Rational:
    """Eigenvalue of the additive-group family: p + (k/2) p (p - 1)."""
    _check_degree(k)
    return Integer(p) + Rational(k, 2) * p * (p - 1)


def line2_parameter(k: int, lam: Rational) -> Optional[int]:
    """Integer root p of k p^2 + (2 - k) p - 2 lam = 0, if any."""
    discriminant = Integer(k - 2) ** 2 + 8 * k * lam
    root = sqrt(discriminant)
    if not root.is_Rational:
        return None
    candidates = []
    for sign in (1, -1):
        p = (k - 2 + sign * root) / (2 * k)
        if p.is_Integer and int(p) not in candidates:
            candidates.append(int(p))
    if not candidates:
        return None
    if len(candidates) > 1:
        logger.warning("Two integer roots for k=%s lambda=%s: %s", k, lam, candidates)
    return candidates[0]


def _scan_bound(k: int, lam: Rational) -> int:
    return int(ceiling(sqrt(max(abs(lam), Integer(1)) * 50 * abs(k)))) + 2


def family_value(line: int, k: int, p: int) -> Rational:
    """Value of finite-group line ``line`` at integer p."""
    if line == 7:
        return Rational(k - 1, 2 * k) + Rational(k, 2) * p * (p + 1)
    for number, c, s, u, v in FINITE_FAMILIES.get(abs(k), ()):
        if number == line:
            return c + s * (u + v * p) ** 2
    raise ValidationError("line", line, f"line {line} does not apply to k={k}")


def _integer_roots(line: int, k: int, lam: Rational) -> Iterator[int]:
    # each family is a quadratic in p; its integer roots are the only candidates
    if line == 7:
        disc = Integer(k) ** 2 - 4 * k * (Rational(k - 1, k) - 2 * lam)
        root = sqrt(disc)
        if root.is_Rational:
            for sign in (1, -1):
                p = (-k + sign * root) / (2 * k)
                if p.is_Integer:
                    yield int(p)
        return
    for number, c, s, u, v in FINITE_FAMILIES.get(abs(k), ()):
        if number != line:
            continue
        root = sqrt((lam - c) / s)
        if root.is_Rational:
            for sign in (1, -1):
                p = (sign * root - u) / v
                if p.is_Integer:
                    yield int(p)


def applicable_lines(k: int) -> Tuple[int, ...]:
    return (7,) + tuple(entry[0] for entry in FINITE_FAMILIES.get(abs(k), ()))


def finite_line_match(k: int, lam: Rational) -> Optional[Tuple[int, int]]:
    """First (line, p) with a finite-group family value equal to lam, lines ascending, small |p| first."""
    _check_degree(k)
    lam = as_rational(lam)
    bound = _scan_bound(k, lam)
    for line in applicable_lines(k):
        roots = sorted({p for p in _integer_roots(line, k, lam) if abs(p) <= bound}, key=lambda p: (abs(p), p))
        for p in roots:
            if family_value(line, k, p) == lam:
                return line, p
    return None


def finite_line_scan(k: int, lam: Rational) -> Optional[int]:
    match = finite_line_match(k, lam)
    return match[0] if match else None


def classify_eigenvalue(k: int, lam: Any) -> SpectralClass:
    """Classify lam for degree k.

    Raises:
        DomainError: If |k| < 3.
        ValidationError: If lam is not an exact rational.
    """
    _check_degree(k)
    lam = as_rational(lam)

    p = line2_parameter(k, lam)
    finite = finite_line_match(k, lam)

    if p is not None:
        jcase = jordan_case(p)
        eps, b, alpha, beta_sign = _JORDAN_ROWS[jcase]
        conflict = finite is not None
        if conflict:
            logger.warning("lambda=%s (k=%s) matches both line 2 and finite line %s", lam, k, finite[0])
        cls = SpectralClass(
            k=k,
            lam=lam,
            line=TableLine.LINE2,
            p=p,
            jcase=jcase,
            a=Rational(1, 2) + Rational(eps, 2 * k),
            b=b,
            alpha=alpha,
            beta=Rational(beta_sign, k),
            n=jacobi_degree(jcase, p),
            eps=eps,
            finite_line=finite[0] if finite else None,
            finite_p=finite[1] if finite else None,
            conflict=conflict,
        )
        logger.debug("k=%s lambda=%s -> line 2, p=%s, case %s", k, lam, p, jcase)
        return cls

    if finite is not None:
        logger.debug("k=%s lambda=%s -> finite line %s (p=%s)", k, lam, *finite)
        return SpectralClass(k=k, lam=lam, line=TableLine.FINITE, finite_line=finite[0], finite_p=finite[1])

    logger.debug("k=%s lambda=%s not in table", k, lam)
    return SpectralClass(k=k, lam=lam, line=TableLine.NOT_IN_TABLE)


def classify_parameter(k: int, p: int) -> SpectralClass:
    return classify_eigenvalue(k, lambda_of(k, p))
