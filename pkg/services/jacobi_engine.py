"""Exact Jacobi polynomials J_n^(alpha, beta) on (0, 1): Rodrigues construction, ODE check, root isolation."""

from dataclasses import dataclass, field
from typing import Any, Tuple

from sympy import QQ, Poly, Rational, Symbol, binomial, ff, gcd

from exceptions import MultipleRoot, RootOutsideUnitInterval, ValidationError
from services.spectrum_classifier import SpectralClass
from utils.engine_decorators import handle_engine_errors
from utils.logging import get_logger

logger = get_logger(__name__)

z = Symbol("z")


def as_poly(value: Any) -> Poly:
    """Coerce an expression, number or Poly to a Poly in z over QQ."""
    if isinstance(value, JacobiPoly):
        return value.poly
    if isinstance(value, Poly):
        return value if value.domain == QQ and value.gens == (z,) else Poly(value.as_expr(), z, domain=QQ)
    return Poly(value, z, domain=QQ)


def normalize(poly: Poly) -> Poly:
    """Primitive integer coefficients with positive leading coefficient, returned over QQ."""
    if poly.is_zero:
        return poly
    _, integral = poly.clear_denoms(convert=True)
    _, primitive = integral.primitive()
    if primitive.LC() < 0:
        primitive = -primitive
    return primitive.set_domain(QQ)


@dataclass(frozen=True)
class RootEnclosure:
    """Isolating interval [lo, hi] of a simple real root; lo == hi for exact rational roots."""

    lo: Rational
    hi: Rational
    poly: Poly = field(repr=False, compare=False)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Rational:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Rational:
        return (self.lo + self.hi) / 2

    def refine(self, bits: int) -> "RootEnclosure":
        """Shrink the enclosure below 2^-bits."""
        eps = Rational(1, 2**bits)
        if self.is_exact or self.width <= eps:
            return self
        lo, hi = self.poly.refine_root(self.lo, self.hi, eps=eps)
        return RootEnclosure(Rational(lo), Rational(hi), self.poly)


@dataclass(frozen=True)
class JacobiPoly:
    """Normalized Jacobi polynomial with its (alpha, beta, n) provenance."""

    poly: Poly
    alpha: Rational
    beta: Rational
    n: int
    roots: Tuple[RootEnclosure, ...] = ()

    @property
    def coeffs(self):
        return self.poly.all_coeffs()

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def __call__(self, value: Any) -> Any:
        return self.poly.eval(value)


def rodrigues_expansion(alpha: Rational, beta: Rational, n: int) -> Poly:
    """(z-1)^-alpha z^-beta d^n/dz^n [(z-1)^(alpha+n) z^(beta+n)] expanded by the Leibniz rule."""
    if n < 0:
        raise ValidationError("n", n, "degree must be non-negative")
    expr = sum(
        (
            binomial(n, j) * ff(alpha + n, n - j) * ff(beta + n, j) * (z - 1) ** j * z ** (n - j)
            for j in range(n + 1)
        ),
        Rational(0),
    )
    return Poly(expr, z, domain=QQ)


def ode_residual(poly: Poly, alpha: Rational, beta: Rational, n: int) -> Poly:
    d1 = poly.diff(z)
    d2 = d1.diff(z)
    return (
        Poly(z * (1 - z), z, domain=QQ) * d2
        + Poly(beta + 1 - (alpha + beta + 2) * z, z, domain=QQ) * d1
        + poly * (n * (alpha + beta + n + 1))
    )


def verify_jacobi_ode(J: JacobiPoly) -> bool:
    """True iff J satisfies the hypergeometric Jacobi equation identically."""
    return ode_residual(J.poly, J.alpha, J.beta, J.n).is_zero


def endpoint_relations(J: JacobiPoly) -> Tuple[bool, bool]:
    """The two endpoint identities implied by the Jacobi equation at z = 0 and z = 1."""
    d1 = J.poly.diff(z)
    c = J.n * (J.alpha + J.beta + J.n + 1)
    at_zero = (J.beta + 1) * d1.eval(0) + c * J.poly.eval(0) == 0
    at_one = -(J.alpha + 1) * d1.eval(1) + c * J.poly.eval(1) == 0
    return at_zero, at_one


def _isolate(poly: Poly, eps=None) -> Tuple[RootEnclosure, ...]:
    degree = poly.degree()
    if degree <= 0:
        return ()
    if poly.eval(0) == 0 or poly.eval(1) == 0:
        raise RootOutsideUnitInterval("Polynomial vanishes at an endpoint", {"poly": str(poly.as_expr())})
    if gcd(poly, poly.diff(z)).degree() > 0:
        raise MultipleRoot("Polynomial has a repeated root", {"poly": str(poly.as_expr())})
    inside = poly.count_roots(0, 1)
    if inside != degree:
        raise RootOutsideUnitInterval(
            "Not all roots lie in (0, 1)", {"poly": str(poly.as_expr()), "inside": inside, "degree": degree}
        )
    intervals = poly.intervals(inf=0, sup=1, eps=eps) if eps is not None else poly.intervals(inf=0, sup=1)
    return tuple(RootEnclosure(Rational(lo), Rational(hi), poly) for (lo, hi), _ in intervals)


@handle_engine_errors
def isolate_roots(J: Any, bits: int = 64) -> Tuple[RootEnclosure, ...]:
    """Isolate the roots of J in (0, 1) to width 2^-bits.

    Raises:
        RootOutsideUnitInterval: If a root lies at 0, 1 or outside the interval.
        MultipleRoot: If J is not squarefree.
    """
    poly = as_poly(J)
    if poly.is_zero:
        raise ValidationError("J", 0, "zero polynomial has no isolated roots")
    return _isolate(poly, eps=Rational(1, 2**bits))


def jacobi_polynomial(alpha: Any, beta: Any, n: int) -> JacobiPoly:
    """Build J_n^(alpha, beta) for arbitrary rational parameters."""
    alpha, beta = Rational(alpha), Rational(beta)
    poly = normalize(rodrigues_expansion(alpha, beta, n))
    if poly.degree() != n:
        raise ValidationError("n", n, f"degenerate parameters alpha={alpha}, beta={beta}")
    return JacobiPoly(poly=poly, alpha=alpha, beta=beta, n=n, roots=_isolate(poly))


@handle_engine_errors
def build_jacobi(cls: SpectralClass) -> JacobiPoly:
    """Jacobi polynomial of a Line2 classification."""
    if not cls.is_line2:
        raise ValidationError("cls", cls.line.value, "Jacobi polynomial needs a line-2 eigenvalue")
    J = jacobi_polynomial(cls.alpha, cls.beta, cls.n)
    logger.debug("J for k=%s p=%s (case %s): %s", cls.k, cls.p, cls.jcase, J.poly.as_expr())
    return J
