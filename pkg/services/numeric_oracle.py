"""Arbitrary-precision evaluations: endpoint-singular quadrature, double-pole residues, constant-relation detection.

Every value produced here is tagged ``numeric``; nothing in this module upgrades a verdict to exact.
"""

from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import mpmath as mp
from sympy import QQ, Poly, Rational

from config.settings import PrecisionConfig
from exceptions import PathHitsPole, PrecisionNotReached, Underdetermined, Unstable, ValidationError
from services.exponent_calculus import KernelForm, is_integer
from services.jacobi_engine import RootEnclosure, as_poly, z
from utils.engine_decorators import handle_engine_errors
from utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class PrecisionContext:
    working_bits: int = 256
    max_refinement: int = 8

    def __post_init__(self):
        if self.working_bits < 53:
            raise ValidationError("working_bits", self.working_bits, "at least 53 bits are required")
        if self.max_refinement < 0:
            raise ValidationError("max_refinement", self.max_refinement, "must be non-negative")

    @classmethod
    def from_config(cls, config: PrecisionConfig) -> "PrecisionContext":
        return cls(working_bits=config.bits, max_refinement=config.max_refinement)

    @property
    def zero_tolerance(self) -> mp.mpf:
        return mp.ldexp(mp.mpf(1), -(self.working_bits // 2))

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.working_bits, self.max_refinement)


@dataclass(frozen=True)
class NumericValue:
    value: Any
    bits: int
    bound: Any
    rigor: str = "numeric"


@dataclass(frozen=True)
class NumericRelation:
    """target = sum coefficients[j] * basis[j] on every sampled functional."""

    coefficients: Tuple[Any, ...]
    residual: Any
    bits: int
    rigor: str = "numeric"


def _mpf(q: Any) -> mp.mpf:
    q = Rational(q)
    return mp.mpf(int(q.p)) / int(q.q)


def _coeffs(poly: Poly) -> List[mp.mpf]:
    return [_mpf(c) for c in poly.all_coeffs()]


def _series_power(e: Any, K: int) -> List[Any]:
    """Coefficients of (1 - t)^e up to t^K."""
    out = [mp.mpf(1)]
    for j in range(K):
        out.append(out[-1] * (j - e) / (j + 1))
    return out


def _series_poly(poly: Poly, K: int) -> List[Any]:
    low_first = list(reversed(_coeffs(poly)))
    return [low_first[j] if j < len(low_first) else mp.mpf(0) for j in range(K + 1)]


def _series_inverse(poly: Poly, K: int) -> List[Any]:
    q = _series_poly(poly, K)
    out = [1 / q[0]]
    for j in range(1, K + 1):
        out.append(-mp.fsum(q[i] * out[j - i] for i in range(1, j + 1)) / q[0])
    return out


def _series_mul(a: Sequence[Any], b: Sequence[Any], K: int) -> List[Any]:
    return [mp.fsum(a[i] * b[j - i] for i in range(j + 1)) for j in range(K + 1)]


class NumericOracle:
    """High-precision evaluator bound to one PrecisionContext."""

    def __init__(self, ctx: Optional[PrecisionContext] = None):
        self.ctx = ctx or PrecisionContext()

    @property
    def two_pi_i(self):
        with mp.workprec(self.ctx.working_bits):
            return 2j * mp.pi

    def _quad(self, f: Callable, interval: Sequence[Any]) -> Tuple[Any, Any]:
        tolerance = self.ctx.zero_tolerance
        value, error = mp.quad(f, interval, error=True)
        degree = 6
        for _ in range(self.ctx.max_refinement):
            if error < tolerance:
                break
            degree += 1
            value, error = mp.quad(f, interval, error=True, maxdegree=degree)
        if error >= tolerance:
            raise PrecisionNotReached(best=value, bound=error)
        return value, error

    @handle_engine_errors
    def quadrature_segment(self, g: Any, a: Any = 0, b: Any = 1) -> NumericValue:
        """Integral of P Omega / J^power over [a, b] within (0, 1).

        The substitutions x = u^(1/(e0+1)) near 0 and 1 - x = v^(1/(e1+1)) near 1 remove the endpoint
        singularities before tanh-sinh quadrature.

        Raises:
            PathHitsPole: If J has a root in [a, b].
            PrecisionNotReached: If the quadrature error stays above tolerance.
        """
        P, J, kernel, power = as_poly(g.P), as_poly(g.J), g.kernel, g.power
        e0, e1 = kernel.e0, kernel.e1
        if e0 <= -1 or e1 <= -1:
            raise ValidationError("kernel", (str(e0), str(e1)), "segment quadrature needs exponents > -1")
        a, b = Rational(a), Rational(b)
        if not (0 <= a < b <= 1):
            raise ValidationError("interval", (str(a), str(b)), "expected 0 <= a < b <= 1")
        if J.degree() > 0 and J.count_roots(a, b) > 0:
            raise PathHitsPole("J has a root on the integration segment", {"a": str(a), "b": str(b)})

        with mp.workprec(self.ctx.working_bits + 20):
            pc, jc = _coeffs(P), _coeffs(J)
            E0, E1 = _mpf(e0), _mpf(e1)
            A, B = _mpf(a), _mpf(b)

            def rational_part(x):
                return mp.polyval(pc, x) / mp.polyval(jc, x) ** power

            def left(u):
                x = u ** (1 / (E0 + 1))
                return rational_part(x) * (1 - x) ** E1 / (E0 + 1)

            def right(v):
                w = v ** (1 / (E1 + 1))
                return rational_part(1 - w) * (1 - w) ** E0 / (E1 + 1)

            def middle(x):
                return rational_part(x) * x**E0 * (1 - x) ** E1

            total, error = mp.mpf(0), mp.mpf(0)
            lo_cut = A if A > 0 else mp.mpf(1) / 4 if B > mp.mpf(1) / 4 else B / 2
            hi_cut = B if B < 1 else max(lo_cut, mp.mpf(3) / 4)
            if A == 0:
                v, err = self._quad(left, [0, lo_cut ** (E0 + 1)])
                total, error = total + v, error + err
            if hi_cut > lo_cut:
                v, err = self._quad(middle, [lo_cut, hi_cut])
                total, error = total + v, error + err
            if B == 1:
                v, err = self._quad(right, [0, (1 - hi_cut) ** (E1 + 1)])
                total, error = total + v, error + err
        return NumericValue(total, self.ctx.working_bits, error)

    def _finite_part_half(self, P: Poly, J: Poly, e_near: Any, e_far: Any, power: int, c: Any, from_one: bool):
        """FP integral from the singular endpoint along the straight segment of complex length c."""
        if is_integer(e_near) and e_near <= -1:
            raise ValidationError("kernel", str(e_near), "finite part undefined for integer exponents <= -1")
        if from_one:
            # local variable w = 1 - z
            flip = Poly(1 - z, z, domain=QQ)
            P, J = P.compose(flip), J.compose(flip)
        Jm = J**power
        roots = mp.polyroots(_coeffs(Jm), maxsteps=200, extraprec=2 * self.ctx.working_bits) if J.degree() > 0 else []
        radius = min([abs(r) for r in roots] + [mp.mpf(1)])
        delta = min(mp.mpf(1) / 2, radius / (4 * abs(c)))
        K = self.ctx.working_bits // 2 + 20 + max(P.degree(), 0)

        h = _series_mul(
            _series_mul(_series_poly(P, K), _series_power(_mpf(e_far), K), K), _series_inverse(Jm, K), K
        )
        E = _mpf(e_near)
        prefactor = c ** (E + 1)
        series_part = mp.fsum(
            h[j] * c**j * delta ** (E + j + 1) / (E + j + 1) for j in range(K + 1)
        )
        pc, jc = _coeffs(P), _coeffs(Jm)
        far = _mpf(e_far)

        def tail(t):
            w = c * t
            return t**E * mp.polyval(pc, w) * (1 - w) ** far / mp.polyval(jc, w)

        value, error = self._quad(tail, [delta, 1])
        truncation = abs(h[K]) * abs(c) ** K * delta ** (K + 1)
        return prefactor * (series_part + value), abs(prefactor) * (error + truncation)

    @handle_engine_errors
    def linear_form_zero(self, P: Any, kernel: KernelForm, J: Any, power: int = 2) -> NumericValue:
        """Finite-part integral of P Omega / J^power along a path from 0 to 1.

        The path is the straight segment when J has no root in (0, 1), otherwise 0 -> 1/2 - i/2 -> 1.
        """
        P, J = as_poly(P), as_poly(J)
        with mp.workprec(self.ctx.working_bits + 20):
            straight = J.degree() <= 0 or J.count_roots(0, 1) == 0
            mid = mp.mpf(1) / 2 if straight else mp.mpc(mp.mpf(1) / 2, -mp.mpf(1) / 2)
            left, left_err = self._finite_part_half(P, J, kernel.e0, kernel.e1, power, mid, from_one=False)
            right, right_err = self._finite_part_half(P, J, kernel.e1, kernel.e0, power, 1 - mid, from_one=True)
            value = left + right
        return NumericValue(value, self.ctx.working_bits, left_err + right_err)

    def _polished_root(self, J: Poly, root: RootEnclosure):
        jc = _coeffs(J)
        if root.is_exact:
            return _mpf(root.lo)
        bits = 64
        enclosure = root.refine(bits)
        for _ in range(self.ctx.max_refinement + 1):
            if enclosure.is_exact:
                return _mpf(enclosure.lo)
            try:
                x = mp.findroot(lambda t: mp.polyval(jc, t), (_mpf(enclosure.lo), _mpf(enclosure.hi)), solver="anderson")
                if _mpf(enclosure.lo) <= x <= _mpf(enclosure.hi):
                    return x
            except (ValueError, ZeroDivisionError) as e:
                logger.debug("Root polishing failed at %s bits: %s", bits, e)
            bits *= 2
            enclosure = root.refine(bits)
        enclosure = root.refine(self.ctx.working_bits + 16)
        return _mpf(enclosure.midpoint)

    @handle_engine_errors
    def residue_double_pole(self, P: Any, kernel: KernelForm, J: Any, root: RootEnclosure) -> NumericValue:
        """Residue of P Omega / J^2 at a simple root of J: (g'J' - gJ'')/J'^3 with g = P Omega."""
        P, J = as_poly(P), as_poly(J)
        with mp.workprec(self.ctx.working_bits + 20):
            x = self._polished_root(J, root)
            pc, jc = _coeffs(P), _coeffs(J)
            E0, E1 = _mpf(kernel.e0), _mpf(kernel.e1)
            omega = x**E0 * (1 - x) ** E1
            d_omega = omega * (E0 / x - E1 / (1 - x))
            p_val, p_der = mp.polyval(pc, x, derivative=True)
            j1 = mp.polyval(_coeffs(J.diff(z)), x)
            j2 = mp.polyval(_coeffs(J.diff(z).diff(z)), x)
            g, g_der = p_val * omega, p_der * omega + p_val * d_omega
            value = (g_der * j1 - g * j2) / j1**3
            bound = abs(value) * mp.ldexp(mp.mpf(1), -self.ctx.working_bits) + mp.ldexp(
                mp.mpf(1), -self.ctx.working_bits
            )
        return NumericValue(value, self.ctx.working_bits, bound)

    @handle_engine_errors
    def residue_by_contour(self, P: Any, kernel: KernelForm, J: Any, power: int, root: RootEnclosure) -> NumericValue:
        """Residue at a root of J from a circle quadrature, for validating the closed formula."""
        P, J = as_poly(P), as_poly(J)
        with mp.workprec(self.ctx.working_bits + 20):
            center = self._polished_root(J, root)
            others = [abs(r - center) for r in mp.polyroots(_coeffs(J), maxsteps=200, extraprec=self.ctx.working_bits)]
            others = [d for d in others if d > mp.ldexp(mp.mpf(1), -self.ctx.working_bits // 4)]
            rho = min(others + [center, 1 - center]) / 2
            pc, jc = _coeffs(P), _coeffs(J)
            E0, E1 = _mpf(kernel.e0), _mpf(kernel.e1)

            def integrand(theta):
                e = mp.expj(theta)
                w = center + rho * e
                return mp.polyval(pc, w) * w**E0 * (1 - w) ** E1 / mp.polyval(jc, w) ** power * rho * e

            pieces = [k * mp.pi / 2 for k in range(5)]
            value, error = self._quad(integrand, pieces)
            value = value / (2 * mp.pi)
        return NumericValue(value, self.ctx.working_bits, error / (2 * mp.pi))


def _stack(vector: Sequence[Any]) -> List[Any]:
    out = []
    for v in vector:
        v = mp.mpc(v)
        out.extend([v.real, v.imag])
    return out


def _proportional(a: Sequence[Any], b: Sequence[Any], tolerance) -> bool:
    dot = mp.fsum(x * y for x, y in zip(a, b))
    na = mp.sqrt(mp.fsum(x * x for x in a))
    nb = mp.sqrt(mp.fsum(y * y for y in b))
    return abs(abs(dot) - na * nb) <= tolerance * max(na * nb, mp.mpf(1))


def _least_squares(A, b, live: Sequence[int]):
    """Least squares through the normal equations; zero leading pivots are fine, a singular Gram matrix is not."""
    try:
        return mp.lu_solve(A.T * A, A.T * b)
    except ZeroDivisionError:
        raise Underdetermined("Basis functionals are linearly dependent", {"columns": list(live)}) from None


def _solve_relation(target: Sequence[Any], basis: Sequence[Sequence[Any]], ctx: PrecisionContext):
    tolerance = ctx.zero_tolerance
    with mp.workprec(ctx.working_bits):
        y = _stack(target)
        columns = [_stack(column) for column in basis]
        live = [j for j, col in enumerate(columns) if max((abs(v) for v in col), default=0) > tolerance]
        coefficients = [mp.mpf(0)] * len(columns)
        if max((abs(v) for v in y), default=0) <= tolerance:
            return coefficients, mp.mpf(0)
        if not live:
            return None
        for i, first in enumerate(live):
            for second in live[i + 1:]:
                if _proportional(columns[first], columns[second], tolerance):
                    raise Underdetermined("Basis functionals are proportional", {"columns": [first, second]})
        rows = [r for r in range(len(y)) if abs(y[r]) > tolerance or any(abs(columns[j][r]) > tolerance for j in live)]
        if len(rows) <= len(live):
            raise Underdetermined(
                "Not enough independent functionals", {"functionals": len(rows), "unknowns": len(live)}
            )
        A = mp.matrix([[columns[j][r] for j in live] for r in rows])
        b = mp.matrix([y[r] for r in rows])
        x = _least_squares(A, b, live)
        residual = mp.norm(A * x - b)
        scale = max(mp.mpf(1), mp.norm(b))
        if residual > tolerance * scale:
            return None
        for position, j in enumerate(live):
            coefficients[j] = x[position]
        return coefficients, residual


@handle_engine_errors
def detect_constant_relation(
    target: Sequence[Any],
    basis: Sequence[Sequence[Any]],
    ctx: PrecisionContext,
    confirm: Optional[Callable[[PrecisionContext], Tuple[Sequence[Any], Sequence[Sequence[Any]]]]] = None,
) -> Optional[NumericRelation]:
    """Real constants d_j with target = sum d_j basis_j on every functional, or None.

    ``confirm`` recomputes the functional vectors at doubled precision; a relation that does not
    reappear there with the same coefficients raises Unstable.

    Raises:
        Underdetermined: If the functionals cannot separate the basis.
        Unstable: If the doubled-precision check disagrees.
    """
    found = _solve_relation(target, basis, ctx)
    if found is None:
        return None
    coefficients, residual = found

    if confirm is not None:
        fine = ctx.doubled()
        target2, basis2 = confirm(fine)
        again = _solve_relation(target2, basis2, fine)
        if again is None:
            raise Unstable("Relation disappeared at doubled precision", {"bits": fine.working_bits})
        tolerance = ctx.zero_tolerance
        for first, second in zip(coefficients, again[0]):
            if abs(first - second) > tolerance * max(mp.mpf(1), abs(first)):
                raise Unstable("Relation coefficients moved at doubled precision", {"bits": fine.working_bits})

    logger.debug("Numeric relation found with residual %s", mp.nstr(residual, 5))
    return NumericRelation(coefficients=tuple(coefficients), residual=residual, bits=ctx.working_bits)
