"""Exact algebraicity decisions and Ostrowski relations for integrals of P z^e0 (1 - z)^e1 / J^m.

Every integrand is a sum of :class:`Term` objects. Terms are grouped by monodromy class
(exponents mod 1); inside a class a primitive, when algebraic, has the shape
G z^f0 (1 - z)^f1 / J^(m-1) with G a polynomial, so algebraicity and constant relations
reduce to linear algebra over QQ.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath as mp
from sympy import QQ, Matrix, Poly, Rational, rf

from exceptions import ExponentSumInteger, IncompatibleKernelClass, NonSquarefreeJ, ValidationError
from services.exponent_calculus import KernelForm, integer_exponent_shortcut, is_integer
from services.jacobi_engine import as_poly, isolate_roots, z
from utils.engine_decorators import handle_engine_errors
from utils.logging import get_logger

if TYPE_CHECKING:
    from services.numeric_oracle import NumericValue, PrecisionContext

logger = get_logger(__name__)

ZERO = Poly(0, z, domain=QQ)
ONE = Poly(1, z, domain=QQ)
Z = Poly(z, z, domain=QQ)
W = Poly(1 - z, z, domain=QQ)
ZW = Z * W


class Verdict(str, Enum):
    ALGEBRAIC_EXACT = "AlgebraicExact"
    TRANSCENDENTAL_EXACT = "TranscendentalExact"
    ALGEBRAIC_BY_MONODROMY = "AlgebraicByMonodromy"

    @property
    def is_algebraic(self) -> bool:
        return self is not Verdict.TRANSCENDENTAL_EXACT


@dataclass(frozen=True)
class Term:
    """P z^e0 (1 - z)^e1 / D with D coprime to z (1 - z)."""

    P: Poly
    kernel: KernelForm
    D: Poly = ONE

    def __post_init__(self):
        object.__setattr__(self, "P", as_poly(self.P))
        object.__setattr__(self, "D", as_poly(self.D))
        if self.D.is_zero:
            raise ValidationError("D", 0, "denominator must be non-zero")

    def __mul__(self, other: "Term") -> "Term":
        return Term(self.P * other.P, self.kernel + other.kernel, self.D * other.D)

    def __neg__(self) -> "Term":
        return Term(-self.P, self.kernel, self.D)

    def scale(self, c) -> "Term":
        return Term(self.P * Rational(c), self.kernel, self.D)

    @property
    def is_zero(self) -> bool:
        return self.P.is_zero

    def derivative(self) -> "Term":
        """Exact derivative, again a single term."""
        e0, e1 = self.kernel.e0, self.kernel.e1
        linear = Poly(e0 * (1 - z) - e1 * z, z, domain=QQ)
        numerator = (self.P.diff(z) * ZW + self.P * linear) * self.D - self.P * ZW * self.D.diff(z)
        return Term(numerator, self.kernel.shift(-1, -1), self.D * self.D)

    def as_expr(self):
        return self.P.as_expr() * self.kernel.as_expr(z) / self.D.as_expr()


@dataclass(frozen=True)
class ClosedForm:
    """Algebraic primitive written as a sum of terms."""

    terms: Tuple[Term, ...] = ()

    @property
    def is_zero(self) -> bool:
        return all(t.is_zero for t in self.terms)

    @property
    def R(self) -> Poly:
        return self.terms[0].P if self.terms else ZERO

    def __add__(self, other: "ClosedForm") -> "ClosedForm":
        return ClosedForm(self.terms + other.terms)

    def scale(self, c) -> "ClosedForm":
        return ClosedForm(tuple(t.scale(c) for t in self.terms))

    def times(self, factor: Term) -> List[Term]:
        return [t * factor for t in self.terms if not t.is_zero]

    def derivative(self) -> List[Term]:
        return [t.derivative() for t in self.terms if not t.is_zero]

    def as_expr(self):
        return sum((t.as_expr() for t in self.terms), Rational(0))


@dataclass(frozen=True)
class ReducedIntegrand:
    """The integrand P Omega / J^power."""

    P: Poly
    kernel: KernelForm
    J: Poly = ONE
    power: int = 2

    def __post_init__(self):
        object.__setattr__(self, "P", as_poly(self.P))
        object.__setattr__(self, "J", as_poly(self.J))

    @property
    def n(self) -> int:
        return max(self.J.degree(), 0)

    @property
    def term(self) -> Term:
        return Term(self.P, self.kernel, self.J**self.power)


@dataclass(frozen=True)
class ReductionResult:
    """P = T(R) + J^(power-2) Lambda."""

    R: Poly
    Lambda: Poly
    kernel: KernelForm
    J: Poly
    power: int = 2

    @property
    def closed_form(self) -> Optional[ClosedForm]:
        """R z^(e0+1) (1 - z)^(e1+1) / J^(power-1), present when Lambda vanishes."""
        if not self.Lambda.is_zero:
            return None
        return ClosedForm((Term(self.R, self.kernel.shift(1, 1), self.J ** (self.power - 1)),))


@dataclass(frozen=True)
class AlgebraicityDecision:
    verdict: Verdict
    reason: str
    closed_form: Optional[ClosedForm] = None
    residual: Optional[Poly] = None
    rigor: str = "exact"


@dataclass(frozen=True)
class ExactRelation:
    """integral(target) - sum c_j integral(basis_j) = algebraic_part, exactly."""

    coefficients: Dict[str, Rational] = field(default_factory=dict)
    algebraic_part: ClosedForm = ClosedForm()
    rigor: str = "exact"


def apply_T(R, J, kernel: KernelForm, power: int = 2) -> Poly:
    """T_m(R) with d/dz[R z^(e0+1) (1-z)^(e1+1) / J^(m-1)] = T_m(R) z^e0 (1-z)^e1 / J^m."""
    R, J = as_poly(R), as_poly(J)
    e0, e1 = kernel.e0, kernel.e1
    linear = Poly(e0 + 1 - (e0 + e1 + 2) * z, z, domain=QQ)
    return ZW * J * R.diff(z) + (linear * J - ZW * J.diff(z) * (power - 1)) * R


def _check_denominator(J: Poly) -> None:
    if J.degree() <= 0:
        return
    if J.eval(0) == 0 or J.eval(1) == 0:
        raise NonSquarefreeJ("J vanishes at an endpoint", {"J": str(J.as_expr())})
    if J.gcd(J.diff(z)).degree() > 0:
        raise NonSquarefreeJ("J is not squarefree", {"J": str(J.as_expr())})


def _hermite_step(P: Poly, J: Poly, kernel: KernelForm, power: int) -> Tuple[Poly, Poly]:
    """R with T_power(R) = P mod J, and the exact quotient (P - T_power(R)) / J."""
    inverse = (ZW * J.diff(z) * (1 - power)).invert(J)
    R = (P * inverse).rem(J)
    return R, (P - apply_T(R, J, kernel, power)).exquo(J)


def lower_to_double_pole(P, J, kernel: KernelForm, power: int) -> Tuple[Poly, Poly]:
    """Hermite-lower P Omega / J^power to P2 Omega / J^2; returns (R, P2) with P = T_power(R) + J^(power-2) P2."""
    P, J = as_poly(P), as_poly(J)
    R_total = ZERO
    m = power
    while m > 2:
        R_m, P = _hermite_step(P, J, kernel, m)
        R_total += R_m * J ** (power - m)
        m -= 1
    return R_total, P


def _triangular(P: Poly, J: Poly, kernel: KernelForm) -> Tuple[Poly, Poly]:
    n = max(J.degree(), 0)
    c = J.LC()
    s = kernel.exponent_sum
    R, rest = ZERO, P
    while not rest.is_zero and rest.degree() > n:
        j = rest.degree() - n - 1
        mono = Poly(rest.LC() / (c * (n - j - s - 2)) * z**j, z, domain=QQ)
        R += mono
        rest -= apply_T(mono, J, kernel, 2)
    return R, rest


@handle_engine_errors
def reduce(P, J, kernel: KernelForm, power: int = 2) -> ReductionResult:
    """Unique decomposition P = T(R) + Lambda with deg Lambda <= deg J.

    Raises:
        ExponentSumInteger: If e0 + e1 is an integer.
        NonSquarefreeJ: If J has a repeated root or vanishes at 0 or 1.
    """
    P, J = as_poly(P), as_poly(J)
    if is_integer(kernel.exponent_sum):
        raise ExponentSumInteger(kernel.e0, kernel.e1)
    if power < 2:
        raise ValidationError("power", power, "reduction needs a denominator power of at least 2")
    if J.is_zero:
        raise ValidationError("J", 0, "denominator must be non-zero")
    if J.degree() <= 0:
        P = P * (1 / J.LC() ** power)
        J, power = ONE, 2
    _check_denominator(J)

    R_high, P2 = lower_to_double_pole(P, J, kernel, power)
    R2, Lambda = _triangular(P2, J, kernel)
    R = R_high + R2 * J ** (power - 2)
    logger.debug("reduce: deg P=%s, deg J=%s, power=%s -> Lambda=%s", P.degree(), J.degree(), power, Lambda)
    return ReductionResult(R=R, Lambda=Lambda, kernel=kernel, J=J, power=power)


@dataclass
class _ClassFrame:
    """Terms of one monodromy class on a common denominator z^(1-f0) (1-z)^(1-f1) J^m."""

    f0: Rational
    f1: Rational
    J: Poly
    m: int
    numerators: List[Poly]

    @property
    def kernel(self) -> KernelForm:
        return KernelForm(self.f0 - 1, self.f1 - 1)

    def degree_bound(self) -> int:
        n = max(self.J.degree(), 0)
        top = max((u.degree() for u in self.numerators if not u.is_zero), default=-1)
        bound = top - n - 1
        critical = (self.m - 1) * n - self.f0 - self.f1
        if critical.is_Integer and critical >= 0:
            bound = max(bound, int(critical))
        return bound


def _side(exponents: Sequence[Rational], integral: bool) -> Rational:
    """Exponent of the primitive's prefactor on one side."""
    w = min(exponents)
    if integral:
        return w + 1 if w < 0 else Rational(0)
    return w + 1


def _frame(terms: Sequence[Term]) -> _ClassFrame:
    key = terms[0].kernel.class_key
    f0 = _side([t.kernel.e0 for t in terms], key[0] == 0)
    f1 = _side([t.kernel.e1 for t in terms], key[1] == 0)

    L = ONE
    for t in terms:
        L = L.lcm(t.D)
    if L.degree() > 0 and (L.eval(0) == 0 or L.eval(1) == 0):
        raise ValidationError("D", str(L.as_expr()), "denominators must not vanish at 0 or 1")
    J, m = ONE, 1
    if L.degree() > 0:
        _, factors = L.sqf_list()
        for factor, multiplicity in factors:
            J = J * factor
            m = max(m, multiplicity)
        J = J.monic()

    Jm = J**m
    numerators = []
    for t in terms:
        s0 = int(t.kernel.e0 - f0 + 1)
        s1 = int(t.kernel.e1 - f1 + 1)
        numerators.append(t.P * Jm.exquo(t.D) * Z**s0 * W**s1)
    return _ClassFrame(f0=f0, f1=f1, J=J, m=m, numerators=numerators)


def group_by_class(tagged: Sequence[Tuple[Optional[int], Term]]) -> List[List[Tuple[Optional[int], Term]]]:
    groups: Dict[Tuple[Rational, Rational], List[Tuple[Optional[int], Term]]] = defaultdict(list)
    for owner, term in tagged:
        if not term.is_zero:
            groups[term.kernel.class_key].append((owner, term))
    return [groups[key] for key in sorted(groups)]


def system_size(target: Sequence[Term], basis: Mapping[str, Sequence[Term]]) -> int:
    """Number of unknowns of the exact relation system."""
    tagged = [(None, t) for t in target] + [(j, t) for j, name in enumerate(basis) for t in basis[name]]
    size = len(basis)
    for items in group_by_class(tagged):
        size += max(_frame([t for _, t in items]).degree_bound() + 1, 0)
    return size


@handle_engine_errors
def solve_ostrowski(target: Sequence[Term], basis: Mapping[str, Sequence[Term]]) -> Optional[ExactRelation]:
    """Constants c_j with integral(target) - sum c_j integral(basis_j) algebraic, or None.

    Coefficients left free by dependent basis elements are set to zero.
    """
    names = list(basis)
    tagged = [(None, t) for t in target] + [(j, t) for j, name in enumerate(names) for t in basis[name]]

    columns = len(names)
    rows: Dict[Tuple[int, int], Dict[int, Rational]] = defaultdict(lambda: defaultdict(lambda: Rational(0)))
    rhs: Dict[Tuple[int, int], Rational] = defaultdict(lambda: Rational(0))
    frames: List[Tuple[_ClassFrame, int, int]] = []

    for index, items in enumerate(group_by_class(tagged)):
        frame = _frame([t for _, t in items])
        bound = frame.degree_bound()
        start = columns
        for i in range(bound + 1):
            image = apply_T(Z**i, frame.J, frame.kernel, frame.m)
            for (degree,), coeff in image.terms():
                rows[(index, degree)][start + i] += coeff
        columns += max(bound + 1, 0)
        frames.append((frame, start, bound))
        for (owner, _), numerator in zip(items, frame.numerators):
            for (degree,), coeff in numerator.terms():
                if owner is None:
                    rhs[(index, degree)] += coeff
                else:
                    rows[(index, degree)][owner] += coeff

    keys = sorted(set(rows) | set(rhs))
    if columns == 0:
        if any(rhs[key] != 0 for key in keys):
            return None
        return ExactRelation()

    if not keys:
        solution = Matrix.zeros(columns, 1)
    else:
        A = Matrix(len(keys), columns, lambda r, c: rows.get(keys[r], {}).get(c, 0))
        b = Matrix(len(keys), 1, lambda r, _: rhs.get(keys[r], 0))
        try:
            solution, params = A.gauss_jordan_solve(b)
        except ValueError:
            logger.debug("No relation: %d equations, %d unknowns", len(keys), columns)
            return None
        solution = solution.subs({tau: 0 for tau in params})

    coefficients = {name: Rational(solution[j]) for j, name in enumerate(names)}
    parts = []
    for frame, start, bound in frames:
        G = Poly(sum((Rational(solution[start + i]) * z**i for i in range(bound + 1)), Rational(0)), z, domain=QQ)
        if not G.is_zero:
            parts.append(Term(G, KernelForm(frame.f0, frame.f1), frame.J ** (frame.m - 1)))
    return ExactRelation(coefficients=coefficients, algebraic_part=ClosedForm(tuple(parts)))


def primitive(terms: Sequence[Term]) -> Optional[ClosedForm]:
    """Algebraic primitive of a sum of terms, or None when it is transcendental."""
    relation = solve_ostrowski(terms, {})
    return None if relation is None else relation.algebraic_part


def terms_vanish(terms: Sequence[Term]) -> bool:
    """Exact test that a sum of terms is identically zero."""
    for items in group_by_class([(None, t) for t in terms]):
        frame = _frame([t for _, t in items])
        if not sum(frame.numerators, ZERO).is_zero:
            return False
    return True


def verify_closed_form(closed: ClosedForm, integrand: Sequence[Term]) -> bool:
    """d/dz closed == sum of integrand terms, checked exactly."""
    return terms_vanish(closed.derivative() + [-t for t in integrand])


@handle_engine_errors
def decide_algebraic(g: ReducedIntegrand) -> AlgebraicityDecision:
    """Exact verdict on the primitive of P Omega / J^power."""
    shortcut = integer_exponent_shortcut(g.kernel)
    if shortcut is not None:
        closed = primitive([g.term])
        if closed is not None:
            return AlgebraicityDecision(Verdict.ALGEBRAIC_BY_MONODROMY, shortcut.reason, closed_form=closed)
        return AlgebraicityDecision(
            Verdict.TRANSCENDENTAL_EXACT, "integer exponent but a non-zero residue at a pole of the integrand"
        )

    if not is_integer(g.kernel.exponent_sum):
        result = reduce(g.P, g.J, g.kernel, g.power)
        if result.Lambda.is_zero:
            return AlgebraicityDecision(
                Verdict.ALGEBRAIC_EXACT, "residual Lambda vanishes", closed_form=result.closed_form, residual=ZERO
            )
        return AlgebraicityDecision(Verdict.TRANSCENDENTAL_EXACT, "non-zero residual Lambda", residual=result.Lambda)

    closed = primitive([g.term])
    if closed is not None:
        return AlgebraicityDecision(
            Verdict.ALGEBRAIC_EXACT, "algebraic primitive solved by undetermined coefficients", closed_form=closed
        )
    return AlgebraicityDecision(
        Verdict.TRANSCENDENTAL_EXACT, "integer exponent sum and no algebraic primitive of the admissible shape"
    )


def mu(P, kernel: KernelForm, allow_integer_sum: bool = False) -> Rational:
    """mu(P) / B(e0 + 1, e1 + 1) = sum p_s (e0 + 1)_s / (e0 + e1 + 2)_s."""
    P = as_poly(P)
    e0, e1 = kernel.e0, kernel.e1
    if e0 <= -1 or e1 <= -1:
        raise ValidationError("kernel", (str(e0), str(e1)), "mu needs both exponents > -1")
    if not allow_integer_sum and is_integer(kernel.exponent_sum):
        raise ExponentSumInteger(e0, e1)
    total = Rational(0)
    for (s,), coeff in P.terms():
        total += coeff * rf(e0 + 1, s) / rf(e0 + e1 + 2, s)
    return Rational(total)


def ostrowski_pair(g1: ReducedIntegrand, g2: ReducedIntegrand) -> Optional[Rational]:
    """d with Lambda_1 + d Lambda_2 = 0, i.e. integral(g1) + d integral(g2) algebraic; None when no such d.

    Raises:
        IncompatibleKernelClass: If the two kernels are not in the same monodromy class.
    """
    if not g1.kernel.same_class(g2.kernel):
        raise IncompatibleKernelClass(
            "Kernels differ modulo integers",
            {"g1": (str(g1.kernel.e0), str(g1.kernel.e1)), "g2": (str(g2.kernel.e0), str(g2.kernel.e1))},
        )
    relation = solve_ostrowski([g1.term], {"g2": [g2.term]})
    if relation is None:
        return None
    return -relation.coefficients["g2"]


@dataclass(frozen=True)
class LinearForms:
    """L0 (path from 0 to 1) followed by 2 pi i times the residues at the roots of J."""

    values: Tuple["NumericValue", ...]

    def all_vanish(self, tolerance) -> bool:
        return all(abs(v.value) < tolerance for v in self.values)


@handle_engine_errors
def linear_forms(g: ReducedIntegrand, ctx: "PrecisionContext") -> LinearForms:
    """Numeric cross-check values of the functionals that vanish exactly on algebraic integrands."""
    from services.numeric_oracle import NumericOracle, NumericValue

    P, J, power = g.P, g.J, g.power
    if J.degree() <= 0:
        P = P * (1 / J.LC() ** power)
        J, power = ONE, 2
    _check_denominator(J)
    _, P2 = lower_to_double_pole(P, J, g.kernel, power)

    oracle = NumericOracle(ctx)
    values = [oracle.linear_form_zero(P2, g.kernel, J, power=2)]
    for root in isolate_roots(J, bits=ctx.working_bits) if J.degree() > 0 else ():
        residue = oracle.residue_double_pole(P2, g.kernel, J, root)
        values.append(NumericValue(residue.value * oracle.two_pi_i, residue.bits, residue.bound * abs(oracle.two_pi_i)))
    return LinearForms(tuple(values))


@dataclass(frozen=True)
class NumericOstrowski:
    """Relation found from functional values only."""

    coefficients: Dict[str, object]
    residual: object
    bits: int
    rigor: str = "numeric"


def _frame_functionals(frame: _ClassFrame, numerator: Poly, oracle) -> List[object]:
    """Functionals of numerator z^(f0-1) (1-z)^(f1-1) / J^m that vanish on exact derivatives."""
    kernel, J, m = frame.kernel, frame.J, frame.m
    P, power = numerator, m
    values: List[object] = []
    if J.degree() > 0:
        if power == 1:
            P, power = P * J, 2
        _, P = lower_to_double_pole(P, J, kernel, power)
        for root in isolate_roots(J, bits=oracle.ctx.working_bits):
            values.append(oracle.residue_double_pole(P, kernel, J, root).value * oracle.two_pi_i)
    Jsq = J**2
    integral0, integral1 = frame.f0.is_Integer, frame.f1.is_Integer
    if not integral0 and not integral1:
        values.append(oracle.linear_form_zero(P, kernel, J, power=2).value)
    for integral, working, local in ((integral0, kernel.e0, 0), (integral1, kernel.e1, 1)):
        if not integral or working >= 0:
            continue
        if working < -1:
            raise ValidationError("kernel", str(working), "numeric functionals need simple poles at integer sides")
        # residue of the simple endpoint pole
        value = P.eval(local) / Jsq.eval(local)
        values.append(oracle.two_pi_i * _rational_mpf(value if local == 0 else -value))
    return values


def _rational_mpf(q: Rational):
    return mp.mpf(int(q.p)) / int(q.q)


@handle_engine_errors
def numeric_relation(
    target: Sequence[Term], basis: Mapping[str, Sequence[Term]], ctx: "PrecisionContext"
) -> Optional[NumericOstrowski]:
    """Numeric counterpart of :func:`solve_ostrowski` for systems too large to solve exactly.

    Raises:
        Underdetermined: If the functionals cannot fix the constants.
        Unstable: If the relation does not survive doubled precision.
    """
    from services.numeric_oracle import NumericOracle, detect_constant_relation

    names = list(basis)
    tagged = [(None, t) for t in target] + [(j, t) for j, name in enumerate(names) for t in basis[name]]
    groups = group_by_class(tagged)

    def vectors(context):
        oracle = NumericOracle(context)
        target_vector: List[object] = []
        basis_vectors: List[List[object]] = [[] for _ in names]
        for items in groups:
            frame = _frame([t for _, t in items])
            owners = [owner for owner, _ in items]
            for slot in [None] + list(range(len(names))):
                numerator = sum(
                    (u for owner, u in zip(owners, frame.numerators) if owner == slot), ZERO
                )
                values = _frame_functionals(frame, numerator, oracle)
                if slot is None:
                    target_vector.extend(values)
                else:
                    basis_vectors[slot].extend(values)
        return target_vector, basis_vectors

    target_vector, basis_vectors = vectors(ctx)
    relation = detect_constant_relation(target_vector, basis_vectors, ctx, confirm=vectors)
    if relation is None:
        return None
    return NumericOstrowski(
        coefficients=dict(zip(names, relation.coefficients)), residual=relation.residual, bits=relation.bits
    )
