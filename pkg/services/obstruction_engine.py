"""Second-order obstruction tests for VE2 and for the three-index system EX2.

Both analyses follow the same ladder: classify the eigenvalues, decide the first-level
integral Phi, then test the Ostrowski relations the integrability criteria require and
finish with the symmetric-matrix condition. Every step appends a certificate link so an
audit pass can replay the exact ones.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath as mp
from sympy import Poly, QQ, Rational

from config.reference_tables import LETTERS
from config.settings import get_config
from exceptions import DomainError, OutOfScope, ValidationError, VeilError
from services.exponent_calculus import (
    KernelForm,
    ex2_delta,
    ex2_phi_exponents,
    i_prime_kernel,
    is_integer,
    psi_prime_kernel,
    ve2_phi_exponents,
)
from services.integral_reducer import (
    ONE,
    AlgebraicityDecision,
    ClosedForm,
    ReducedIntegrand,
    Term,
    decide_algebraic,
    mu,
    numeric_relation,
    solve_ostrowski,
    system_size,
    verify_closed_form,
)
from services.jacobi_engine import JacobiPoly, build_jacobi
from services.numeric_oracle import PrecisionContext
from services.spectrum_classifier import SpectralClass, TableLine, classify_eigenvalue
from utils.logging import get_logger

logger = get_logger(__name__)

# above this many unknowns a relation is detected numerically
EXACT_SYSTEM_LIMIT = 400

ASSUMPTION_COUPLING = "the coupling coefficients of the potential along the Darboux point are non zero"

VE2_ORDER = ("gamma", "alpha")
EX2_ORDER = ("gamma", "beta", "alpha")


class Status(str, Enum):
    OBSTRUCTED_EXACT = "ObstructedExact"
    OBSTRUCTED_NUMERIC = "ObstructedNumeric"
    NO_OBSTRUCTION_FOUND = "NoObstructionFound"
    VIRTUALLY_ABELIAN = "VirtuallyAbelian"
    OUT_OF_SCOPE = "OutOfScope"
    INCONCLUSIVE = "Inconclusive"

    @property
    def is_obstructed(self) -> bool:
        return self in (Status.OBSTRUCTED_EXACT, Status.OBSTRUCTED_NUMERIC)


@dataclass
class CertificateLink:
    """One step of the argument behind a status."""

    step: str
    claim: str
    rigor: str = "exact"
    holds: bool = True
    check: Optional[Callable[[], bool]] = field(default=None, repr=False, compare=False)


@dataclass
class IntegralVerdict:
    name: str
    algebraic: bool
    reason: str
    rigor: str = "exact"
    witness: Optional[str] = None
    mu: Optional[Rational] = None


@dataclass
class Relation:
    """integral(target) = sum c_j I_j + algebraic part, or the proof that no constants work."""

    name: str
    exists: bool
    coefficients: Dict[str, Any] = field(default_factory=dict)
    algebraic_part: Optional[ClosedForm] = field(default=None, repr=False, compare=False)
    rigor: str = "exact"
    system_size: int = 0
    bits: Optional[int] = None
    residual: Any = None

    @property
    def is_exact(self) -> bool:
        return self.rigor == "exact"


@dataclass
class MatrixCheck:
    name: str
    entries: List[List[Any]]
    symmetric: bool
    rigor: str = "exact"


@dataclass
class SymmetryResult:
    symmetric: bool
    rigor: str = "exact"

    def __bool__(self) -> bool:
        return self.symmetric


@dataclass
class PairCertificate:
    first: str
    second: str
    independent: bool
    reason: str
    rigor: str = "exact"


@dataclass
class RankResult:
    """Rank of the first-level integrals with the relations expressing the dependent ones."""

    rank: int
    basis: List[str]
    relations: Dict[str, Relation] = field(default_factory=dict)
    pairs: List[PairCertificate] = field(default_factory=list)

    @property
    def rigor(self) -> str:
        links = [p.rigor for p in self.pairs] + [r.rigor for r in self.relations.values()]
        return "numeric" if "numeric" in links else "exact"


@dataclass
class ObstructionReport:
    system: str
    k: int
    eigenvalues: Dict[str, Rational]
    classes: Dict[str, SpectralClass] = field(default_factory=dict)
    status: Status = Status.INCONCLUSIVE
    reason: str = ""
    phi: Optional[IntegralVerdict] = None
    psi: Dict[str, IntegralVerdict] = field(default_factory=dict)
    ostrowski: List[Relation] = field(default_factory=list)
    matrix_checks: List[MatrixCheck] = field(default_factory=list)
    rank: Optional[int] = None
    letter: Optional[str] = None
    exceptional: bool = False
    characters: Dict[str, Any] = field(default_factory=dict)
    certificate: List[CertificateLink] = field(default_factory=list)
    assumptions: List[str] = field(default_factory=lambda: [ASSUMPTION_COUPLING])

    @property
    def rigor(self) -> str:
        return "numeric" if any(link.rigor != "exact" for link in self.certificate) else "exact"

    def cases(self) -> Dict[str, Optional[int]]:
        return {name: cls.jcase for name, cls in self.classes.items()}

    def parameters(self) -> Dict[str, Optional[int]]:
        return {name: cls.p for name, cls in self.classes.items()}


@dataclass
class SecondLevelPlan:
    """Integrands of the second-level ladder for one choice of line-2 blocks."""

    k: int
    classes: Dict[str, SpectralClass]
    jacobi: Dict[str, JacobiPoly]
    phi_integrand: ReducedIntegrand
    i_prime: Dict[str, Term]
    psi_integrands: Dict[str, ReducedIntegrand] = field(default_factory=dict)
    xm_integrands: Dict[str, List[Term]] = field(default_factory=dict)

    def psi_shape(self, nu: str) -> Tuple[str, KernelForm]:
        """Cofactor label and exponents of Psi'_nu for an algebraic Phi."""
        return psi_prime_kernel(self.phi_integrand.kernel, self.k, self.classes[nu].jcase)

    def with_phi(self, closed: ClosedForm) -> "SecondLevelPlan":
        """Attach Psi'_nu = Phi I'_nu for the closed form of Phi."""
        for nu, prime in self.i_prime.items():
            terms = closed.times(prime)
            if len(terms) == 1 and terms[0].D == prime.D:
                t = terms[0]
                self.psi_integrands[nu] = ReducedIntegrand(t.P, t.kernel, self.jacobi[nu].poly, 2)
        return self


def i_prime_term(cls: SpectralClass, J: JacobiPoly) -> Term:
    """I'_nu = 1 / x1^2 as a term over J^2."""
    return Term(ONE, i_prime_kernel(cls.k, cls.jcase), J.poly**2)


def _line2_or_raise(classes: Mapping[str, SpectralClass]) -> None:
    for name, cls in classes.items():
        if not cls.is_line2:
            raise OutOfScope(
                "Second-level plans need line-2 eigenvalues", {"index": name, "line": cls.line.value, "lambda": str(cls.lam)}
            )


def _plan(classes: Dict[str, SpectralClass], kernel: KernelForm) -> SecondLevelPlan:
    _line2_or_raise(classes)
    k = next(iter(classes.values())).k
    jacobi = {name: build_jacobi(cls) for name, cls in classes.items()}
    return SecondLevelPlan(
        k=k,
        classes=classes,
        jacobi=jacobi,
        phi_integrand=ReducedIntegrand(ONE, kernel),
        i_prime={name: i_prime_term(cls, jacobi[name]) for name, cls in classes.items()},
    )


def build_ve2_plan(cls_gamma: SpectralClass, cls_alpha: SpectralClass) -> SecondLevelPlan:
    """Phi' = z^E0 (1 - z)^E1 J_gamma J_alpha^2.

    Raises:
        OutOfScope: If either block is not on line 2.
    """
    classes = {"gamma": cls_gamma, "alpha": cls_alpha}
    _line2_or_raise(classes)
    plan = _plan(classes, ve2_phi_exponents(cls_gamma.k, cls_gamma.jcase, cls_alpha.jcase))
    P = plan.jacobi["gamma"].poly * plan.jacobi["alpha"].poly ** 2
    plan.phi_integrand = ReducedIntegrand(P, plan.phi_integrand.kernel)
    return plan


def build_ex2_plan(cls_gamma: SpectralClass, cls_beta: SpectralClass, cls_alpha: SpectralClass) -> SecondLevelPlan:
    """Phi' = z^E0 (1 - z)^E1 J_gamma J_beta J_alpha."""
    classes = {"gamma": cls_gamma, "beta": cls_beta, "alpha": cls_alpha}
    _line2_or_raise(classes)
    plan = _plan(classes, ex2_phi_exponents(cls_gamma.k, cls_gamma.jcase, cls_beta.jcase, cls_alpha.jcase))
    P = plan.jacobi["gamma"].poly * plan.jacobi["beta"].poly * plan.jacobi["alpha"].poly
    plan.phi_integrand = ReducedIntegrand(P, plan.phi_integrand.kernel)
    return plan


def letter_of(jcase_gamma: int, jcase_alpha: int) -> Optional[str]:
    """Letter of a (gamma, alpha) case cell in the VE2 grid, None for the cells without one."""
    if jcase_gamma not in (1, 2, 3, 4) or jcase_alpha not in (1, 2, 3, 4):
        raise ValidationError("jcase", (jcase_gamma, jcase_alpha), "cases must be 1, 2, 3 or 4")
    return LETTERS[jcase_gamma - 1][jcase_alpha - 1]


def orthogonality_fast_path(cls_gamma: SpectralClass, cls_alpha: SpectralClass) -> bool:
    """Degree conditions under which J_gamma is orthogonal to J_alpha^2 and Phi is algebraic."""
    cases = (cls_gamma.jcase, cls_alpha.jcase)
    if cases == (1, 1):
        return 2 * cls_alpha.n < cls_gamma.n
    if cases == (1, 2):
        return 2 * cls_alpha.n + 1 < cls_gamma.n
    return False


def ve2_exceptional(k: int, jcase_gamma: int, jcase_alpha: int) -> bool:
    if abs(k) == 4:
        return True
    return abs(k) == 3 and jcase_gamma == 3 and jcase_alpha in (3, 4)


def ex2_exceptional(k: int, cases: Sequence[int]) -> bool:
    if abs(k) == 4:
        return True
    return abs(k) == 3 and all(c in (3, 4) for c in cases)


def _constant(c: Any) -> ClosedForm:
    return ClosedForm((Term(Poly(Rational(c), *ONE.gens, domain=QQ), KernelForm(0, 0)),))


def _product(left: ClosedForm, right: Sequence[Term]) -> List[Term]:
    return [a * b for a in left.terms for b in right if not a.is_zero and not b.is_zero]


def _as_mpf(value: Any):
    if hasattr(value, "value"):
        value = value.value
    if isinstance(value, Rational):
        return mp.mpf(int(value.p)) / int(value.q)
    return mp.mpmathify(value)


def _is_exact(value: Any) -> bool:
    return isinstance(value, int) or (isinstance(value, Rational) and value.is_Rational)


def check_symmetry_criterion(E: Sequence[Sequence[Any]], tolerance: Any = None) -> SymmetryResult:
    """E == E^T entrywise; numeric entries are compared within tolerance and tag the result numeric.

    Raises:
        ValidationError: If E is not square.
    """
    size = len(E)
    if any(len(row) != size for row in E):
        raise ValidationError("E", [len(row) for row in E], "matrix must be square")
    if tolerance is None:
        tolerance = PrecisionContext.from_config(get_config().precision).zero_tolerance
    rigor = "exact"
    symmetric = True
    for i, j in combinations(range(size), 2):
        a, b = E[i][j], E[j][i]
        if _is_exact(a) and _is_exact(b):
            equal = Rational(a) == Rational(b)
        else:
            rigor = "numeric"
            equal = abs(_as_mpf(a) - _as_mpf(b)) < tolerance
        symmetric = symmetric and equal
    return SymmetryResult(symmetric, rigor)


class ObstructionService:
    """Runs the VE2 and EX2 decision trees and produces :class:`ObstructionReport` objects."""

    def __init__(self, ctx: Optional[PrecisionContext] = None, exact_limit: int = EXACT_SYSTEM_LIMIT):
        """
        Args:
            ctx: Precision used by the numeric fallback. Defaults to the configured precision.
            exact_limit: Largest exact linear system attempted before falling back to numeric detection.
        """
        self.ctx = ctx or PrecisionContext.from_config(get_config().precision)
        self.exact_limit = exact_limit

    # -- bookkeeping ---------------------------------------------------------------

    @staticmethod
    def _link(report: ObstructionReport, step: str, claim: str, rigor: str = "exact", holds: bool = True, check=None):
        report.certificate.append(CertificateLink(step=step, claim=claim, rigor=rigor, holds=holds, check=check))

    @staticmethod
    def _finish(report: ObstructionReport, status: Status, reason: str) -> ObstructionReport:
        report.status = status
        report.reason = reason
        return report

    def _obstructed(self, report: ObstructionReport, reason: str) -> ObstructionReport:
        status = Status.OBSTRUCTED_EXACT if report.rigor == "exact" else Status.OBSTRUCTED_NUMERIC
        return self._finish(report, status, reason)

    def _relation(
        self, report: ObstructionReport, name: str, target: Sequence[Term], basis: Mapping[str, Sequence[Term]]
    ) -> Relation:
        """Exact Ostrowski test when the system is small enough, numeric detection otherwise."""
        target = [t for t in target if not t.is_zero]
        size = system_size(target, basis)
        if size <= self.exact_limit:
            found = solve_ostrowski(target, basis)
            if found is None:
                relation = Relation(name, False, system_size=size)
                check = lambda: solve_ostrowski(target, basis) is None  # noqa: E731
            else:
                relation = Relation(name, True, dict(found.coefficients), found.algebraic_part, system_size=size)
                integrand = list(target) + [
                    t.scale(-c) for label, c in found.coefficients.items() if c != 0 for t in basis[label]
                ]
                check = lambda: verify_closed_form(found.algebraic_part, integrand)  # noqa: E731
        else:
            logger.info("%s: %d unknowns, detecting numerically at %d bits", name, size, self.ctx.working_bits)
            numeric = numeric_relation(target, basis, self.ctx)
            relation = Relation(
                name,
                numeric is not None,
                dict(numeric.coefficients) if numeric is not None else {},
                rigor="numeric",
                system_size=size,
                bits=self.ctx.working_bits,
                residual=numeric.residual if numeric is not None else None,
            )
            check = None
        report.ostrowski.append(relation)
        claim = f"{name}: relation found" if relation.exists else f"{name}: no constants make it algebraic"
        self._link(report, name, claim, relation.rigor, relation.exists, check)
        logger.debug("%s -> exists=%s rigor=%s coefficients=%s", name, relation.exists, relation.rigor, relation.coefficients)
        return relation

    # -- stage 0: classification -----------------------------------------------------

    def _classify(self, report: ObstructionReport) -> Optional[Dict[str, SpectralClass]]:
        try:
            classes = {name: classify_eigenvalue(report.k, lam) for name, lam in report.eigenvalues.items()}
        except DomainError as e:
            self._finish(report, Status.OUT_OF_SCOPE, e.message)
            return None
        report.classes = classes
        lines = {cls.line for cls in classes.values()}
        if lines == {TableLine.FINITE}:
            self._link(report, "elimination", "every first-order block has a finite Galois group")
            self._finish(
                report,
                Status.VIRTUALLY_ABELIAN,
                "all blocks on finite lines: the variational equation is virtually Abelian by elimination",
            )
            return None
        if TableLine.NOT_IN_TABLE in lines:
            missing = sorted(name for name, cls in classes.items() if cls.line is TableLine.NOT_IN_TABLE)
            self._finish(
                report, Status.OUT_OF_SCOPE, f"eigenvalue of {', '.join(missing)} not in the table: VE1 already obstructs"
            )
            return None
        if lines != {TableLine.LINE2}:
            self._finish(report, Status.OUT_OF_SCOPE, "mixed finite and additive blocks are not covered")
            return None
        return classes

    # -- stage 1: Phi ----------------------------------------------------------------

    def _decide_phi(self, report: ObstructionReport, plan: SecondLevelPlan, fast_path: bool) -> AlgebraicityDecision:
        g = plan.phi_integrand
        decision = decide_algebraic(g)
        value = None
        kernel = g.kernel
        if kernel.e0 > -1 and kernel.e1 > -1 and not is_integer(kernel.exponent_sum):
            value = mu(g.P, kernel)
        if fast_path:
            self._link(report, "phi-orthogonality", "degree condition forces mu(P) = 0", check=lambda: mu(g.P, kernel) == 0)
        witness = None
        if decision.closed_form is not None:
            witness = str(decision.closed_form.as_expr())
        elif decision.residual is not None:
            witness = str(decision.residual.as_expr())
        report.phi = IntegralVerdict(
            name="Phi",
            algebraic=decision.verdict.is_algebraic,
            reason=decision.reason,
            witness=witness,
            mu=value,
        )
        closed = decision.closed_form
        check = None
        if closed is not None:
            check = lambda: verify_closed_form(closed, [g.term])  # noqa: E731
        self._link(report, "phi", f"Phi {decision.verdict.value}: {decision.reason}", check=check)
        logger.info("Phi for k=%s %s: %s", report.k, report.cases(), decision.verdict.value)
        return decision

    def _phi_transcendental(self, report: ObstructionReport, plan: SecondLevelPlan) -> ObstructionReport:
        """Phi + d_nu I_nu in K for every nu; local characters rule it out outside exceptional cells."""
        kernel = plan.phi_integrand.kernel
        if not report.exceptional:

            def compatible() -> bool:
                return all(kernel.same_class(prime.kernel) for prime in plan.i_prime.values())

            self._link(
                report,
                "phi-characters",
                "local characters of Phi' and some I'_nu differ, so Phi + d I_nu is never algebraic",
                check=lambda: not compatible(),
            )
            if compatible():
                return self._deep_phi_stage(report, plan)
            return self._obstructed(report, "Phi transcendental: no relation Phi + d_nu I_nu can be algebraic")
        return self._deep_phi_stage(report, plan)

    def _deep_phi_stage(self, report: ObstructionReport, plan: SecondLevelPlan) -> ObstructionReport:
        phi = [plan.phi_integrand.term]
        for name in plan.classes:
            relation = self._relation(report, f"Phi + d I_{name}", phi, {f"I_{name}": [plan.i_prime[name]]})
            if not relation.exists:
                return self._obstructed(report, f"Phi transcendental and Phi + d I_{name} is not algebraic for any d")
        return self._finish(
            report, Status.INCONCLUSIVE, "exceptional cell: every relation Phi + d I_nu holds; higher integrals undecided"
        )

    # -- rank of the I system ----------------------------------------------------------

    def rank_of_I_system(self, classes: Sequence[Tuple[str, SpectralClass]], report: Optional[ObstructionReport] = None) -> RankResult:
        """Rank of {I_nu} modulo K, with the relations of the dependent integrals on the chosen basis."""
        report = report or ObstructionReport(system="rank", k=classes[0][1].k, eigenvalues={})
        named = dict(classes)
        jacobi = {name: build_jacobi(cls) for name, cls in classes}
        primes = {name: i_prime_term(cls, jacobi[name]) for name, cls in classes}
        result = RankResult(rank=0, basis=[])

        for first, second in combinations([name for name, _ in classes], 2):
            c1, c2 = named[first], named[second]
            if c1.lam == c2.lam:
                result.pairs.append(PairCertificate(first, second, False, "identical eigenvalues: I coincide"))
            elif c1.eps != c2.eps:
                result.pairs.append(PairCertificate(first, second, True, "characters at z = 0 differ"))
            else:
                pair = self._relation(report, f"I_{second} against I_{first}", [primes[second]], {f"I_{first}": [primes[first]]})
                result.pairs.append(
                    PairCertificate(first, second, not pair.exists, "joint reduction", pair.rigor)
                )

        for name, cls in classes:
            if not result.basis:
                result.basis.append(name)
                continue
            same = [b for b in result.basis if named[b].lam == cls.lam]
            if same:
                coefficients = {f"I_{b}": Rational(1 if b == same[0] else 0) for b in result.basis}
                result.relations[name] = Relation(f"I_{name} = I_{same[0]}", True, coefficients, ClosedForm())
                continue
            if all(named[b].eps != cls.eps for b in result.basis):
                result.basis.append(name)
                continue
            basis = {f"I_{b}": [primes[b]] for b in result.basis}
            relation = self._relation(report, f"I_{name} in span", [primes[name]], basis)
            if relation.exists:
                result.relations[name] = relation
            else:
                result.basis.append(name)
        result.rank = len(result.basis)
        report.rank = result.rank
        logger.debug("rank of I system %s: %d (basis %s)", [n for n, _ in classes], result.rank, result.basis)
        return result

    # -- VE2 -------------------------------------------------------------------------

    def analyze_ve2(self, k: int, lambda_gamma: Any, lambda_alpha: Any) -> ObstructionReport:
        """Second variational equation with the blocks gamma and alpha.

        Returns:
            ObstructionReport: The status and the certificate chain; mathematical outcomes never raise.

        Raises:
            ValidationError: If an eigenvalue is not an exact rational.
        """
        report = ObstructionReport(system="VE2", k=k, eigenvalues={"gamma": lambda_gamma, "alpha": lambda_alpha})
        classes = self._classify(report)
        if classes is None:
            return report
        report.eigenvalues = {name: cls.lam for name, cls in classes.items()}
        try:
            self._ve2(report, classes["gamma"], classes["alpha"])
        except VeilError as e:
            logger.warning("%s k=%s stopped early: %s", report.system, k, e)
            self._finish(report, Status.INCONCLUSIVE, f"analysis stopped: {e.message}")
        logger.info("VE2 k=%s cases=%s -> %s", k, report.cases(), report.status.value)
        return report

    def _ve2(self, report: ObstructionReport, cg: SpectralClass, ca: SpectralClass) -> ObstructionReport:
        plan = build_ve2_plan(cg, ca)
        report.exceptional = ve2_exceptional(report.k, cg.jcase, ca.jcase)
        phi = self._decide_phi(report, plan, orthogonality_fast_path(cg, ca))
        if not phi.verdict.is_algebraic:
            return self._phi_transcendental(report, plan)
        report.letter = letter_of(cg.jcase, ca.jcase)
        plan.with_phi(phi.closed_form)
        return self._ve2_phi_algebraic(report, plan, phi.closed_form)

    def _ve2_phi_algebraic(self, report: ObstructionReport, plan: SecondLevelPlan, F: ClosedForm) -> ObstructionReport:
        Ia, Ig = plan.i_prime["alpha"], plan.i_prime["gamma"]
        both = {"I_alpha": [Ia], "I_gamma": [Ig]}

        ra = self._relation(report, "Psi_alpha - d_alpha I_alpha", F.times(Ia), {"I_alpha": [Ia]})
        if not ra.exists:
            report.psi["alpha"] = IntegralVerdict("Psi_alpha", False, "transcendental for every choice of Phi", ra.rigor)
            return self._obstructed(report, "no constant d_alpha makes Psi_alpha - d_alpha I_alpha algebraic")
        if not ra.is_exact:
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, "Psi_alpha relation found numerically; no closed form for later stages")
        d_alpha = ra.coefficients["I_alpha"]
        psi_alpha = ra.algebraic_part
        phi_rep = F + _constant(-d_alpha)
        report.characters["phi_constant"] = -d_alpha
        report.psi["alpha"] = IntegralVerdict("Psi_alpha", True, "Phi fixed modulo constants by cancelling the I_alpha part")

        rg = self._relation(
            report, "Psi_gamma - d_gamma I_gamma - d I_alpha", phi_rep.times(Ig), {"I_gamma": [Ig], "I_alpha": [Ia]}
        )
        if not rg.exists:
            report.psi["gamma"] = IntegralVerdict("Psi_gamma", False, "no relation with I_gamma and I_alpha", rg.rigor)
            return self._obstructed(report, "Psi_gamma is not algebraic modulo I_gamma and I_alpha")
        if not rg.is_exact:
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, "Psi_gamma relation found numerically")
        d_gamma, d = rg.coefficients["I_gamma"], rg.coefficients["I_alpha"]
        f = rg.algebraic_part
        report.psi["gamma"] = IntegralVerdict(
            "Psi_gamma", d_gamma == 0 and d == 0, f"Psi_gamma = {d_gamma} I_gamma + {d} I_alpha + algebraic"
        )

        rank = self.rank_of_I_system([("alpha", plan.classes["alpha"]), ("gamma", plan.classes["gamma"])], report)
        self._link(report, "I-rank", f"rank of (I_alpha, I_gamma) is {rank.rank}", rank.rigor)

        if rank.rank == 2:
            if d_gamma != 0:
                return self._obstructed(report, "d_gamma != 0 needs a relation between I_gamma and I_alpha, which are independent")
            plan.xm_integrands["X"] = psi_alpha.times(Ia)
            plan.xm_integrands["M"] = f.times(Ia) + psi_alpha.times(Ig)
            rx = self._relation(report, "X = a_X I_alpha + b_X I_gamma", plan.xm_integrands["X"], both)
            rm = self._relation(report, "M - d/2 I_alpha^2 = a_M I_alpha + b_M I_gamma", plan.xm_integrands["M"], both)
            if not rx.exists or not rm.exists:
                missing = "X" if not rx.exists else "M"
                return self._obstructed(report, f"{missing} has no Ostrowski relation with I_alpha and I_gamma")
            E = [
                [rm.coefficients["I_alpha"], rm.coefficients["I_gamma"]],
                [rx.coefficients["I_alpha"], rx.coefficients["I_gamma"]],
            ]
            return self._symmetry_gate(report, E)

        relation = rank.relations["gamma"]
        if not relation.is_exact:
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, "I_gamma depends on I_alpha numerically")
        theta = relation.coefficients["I_alpha"]
        kappa = relation.algebraic_part
        e = theta * d_gamma + d
        f_tilde = f + kappa.scale(d_gamma)
        target = f_tilde.times(Ia) + psi_alpha.times(Ig) + psi_alpha.scale(theta).times(Ia)
        plan.xm_integrands["M + theta X"] = target
        report.characters["theta"] = theta
        report.characters["e"] = e
        combined = self._relation(report, "M + theta X - e/2 I_alpha^2 = a I_alpha", target, {"I_alpha": [Ia]})
        if combined.exists:
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, "rank one criterion satisfied: M + theta X is a polynomial in I_alpha")
        return self._obstructed(report, "M + theta X - e/2 I_alpha^2 is not algebraic modulo I_alpha")

    def _symmetry_gate(self, report: ObstructionReport, E: List[List[Any]], name: str = "E") -> ObstructionReport:
        result = check_symmetry_criterion(E, self.ctx.zero_tolerance)
        report.matrix_checks.append(MatrixCheck(name, E, result.symmetric, result.rigor))
        self._link(
            report,
            f"{name}-symmetry",
            f"{name} is {'symmetric' if result else 'not symmetric'}",
            result.rigor,
            result.symmetric,
            check=lambda: check_symmetry_criterion(E, self.ctx.zero_tolerance).symmetric == result.symmetric,
        )
        if result:
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, f"coboundary criterion satisfied: {name} is symmetric")
        return self._obstructed(report, f"coboundary criterion fails: {name} is not symmetric")

    # -- EX2 -------------------------------------------------------------------------

    def analyze_ex2(self, k: int, lambda_gamma: Any, lambda_beta: Any, lambda_alpha: Any) -> ObstructionReport:
        """Three-index system with the blocks gamma, beta and alpha.

        Raises:
            ValidationError: If an eigenvalue is not an exact rational.
        """
        report = ObstructionReport(
            system="EX2", k=k, eigenvalues={"gamma": lambda_gamma, "beta": lambda_beta, "alpha": lambda_alpha}
        )
        classes = self._classify(report)
        if classes is None:
            return report
        report.eigenvalues = {name: cls.lam for name, cls in classes.items()}
        try:
            self._ex2(report, classes)
        except VeilError as e:
            logger.warning("%s k=%s stopped early: %s", report.system, k, e)
            self._finish(report, Status.INCONCLUSIVE, f"analysis stopped: {e.message}")
        logger.info("EX2 k=%s cases=%s -> %s", k, report.cases(), report.status.value)
        return report

    @staticmethod
    def _ex2_characters(plan: SecondLevelPlan) -> Dict[str, Any]:
        """Exponent pairs (E0 - 2a_i + 2a_j, E1 - 2b_i + 2b_j) mod Z and the Delta of the sign pattern."""
        kernel = plan.phi_integrand.kernel
        out: Dict[str, Any] = {}
        for i, j in ((i, j) for i in EX2_ORDER for j in EX2_ORDER if i != j):
            ci, cj = plan.classes[i], plan.classes[j]
            out[f"{i},{j}"] = KernelForm(kernel.e0 - 2 * ci.a + 2 * cj.a, kernel.e1 - 2 * ci.b + 2 * cj.b).class_key
        eps = [plan.classes[name].eps for name in EX2_ORDER]
        out["delta_beta_alpha"] = ex2_delta(eps[0], eps[1], eps[2], plan.k)
        return out

    def _ex2(self, report: ObstructionReport, classes: Dict[str, SpectralClass]) -> ObstructionReport:
        plan = build_ex2_plan(classes["gamma"], classes["beta"], classes["alpha"])
        report.exceptional = ex2_exceptional(report.k, [classes[n].jcase for n in EX2_ORDER])
        report.characters.update(self._ex2_characters(plan))
        phi = self._decide_phi(report, plan, fast_path=False)
        if not phi.verdict.is_algebraic:
            return self._phi_transcendental(report, plan)
        plan.with_phi(phi.closed_form)
        return self._ex2_phi_algebraic(report, plan, phi.closed_form)

    def _ex2_phi_algebraic(self, report: ObstructionReport, plan: SecondLevelPlan, F: ClosedForm) -> ObstructionReport:
        primes = plan.i_prime
        rank = self.rank_of_I_system([(name, plan.classes[name]) for name in ("alpha", "beta", "gamma")], report)
        self._link(report, "I-rank", f"rank of (I_alpha, I_beta, I_gamma) is {rank.rank}", rank.rigor)
        if any(not r.is_exact for r in rank.relations.values()):
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, "dependence among the I found numerically")
        basis = {f"I_{b}": [primes[b]] for b in rank.basis}

        psi: Dict[str, Relation] = {}
        for mu_name in ("alpha", "beta", "gamma"):
            relation = self._relation(report, f"Psi_{mu_name} = D I + f", F.times(primes[mu_name]), basis)
            if not relation.exists:
                report.psi[mu_name] = IntegralVerdict(f"Psi_{mu_name}", False, "not algebraic modulo the I", relation.rigor)
                return self._obstructed(report, f"Psi_{mu_name} has no Ostrowski relation with the first-level integrals")
            if not relation.is_exact:
                return self._finish(report, Status.NO_OBSTRUCTION_FOUND, f"Psi_{mu_name} relation found numerically")
            psi[mu_name] = relation
            algebraic = all(c == 0 for c in relation.coefficients.values())
            report.psi[mu_name] = IntegralVerdict(f"Psi_{mu_name}", algebraic, "Ostrowski relation with the I")

        if rank.rank == 3:
            return self._ex2_rank_three(report, plan, psi, basis)
        if rank.rank == 2:
            return self._ex2_rank_two(report, plan, psi, rank)
        return self._ex2_rank_one(report, plan, psi, rank)

    def _ex2_rank_three(self, report, plan, psi: Dict[str, Relation], basis) -> ObstructionReport:
        primes = plan.i_prime
        order = ("alpha", "beta", "gamma")
        D = [[psi[r].coefficients[f"I_{c}"] for c in order] for r in order]
        d = D[0][0]
        scalar = all(D[i][j] == (d if i == j else 0) for i in range(3) for j in range(3))
        report.matrix_checks.append(MatrixCheck("D", D, scalar))
        self._link(report, "D-scalar", "D is a scalar matrix" if scalar else "D is not scalar", holds=scalar)
        if not scalar:
            return self._obstructed(report, "rank three needs D = d Id")
        f = {name: psi[name].algebraic_part for name in order}
        rows = []
        for i, j in (("beta", "gamma"), ("gamma", "alpha"), ("alpha", "beta")):
            target = f[i].times(primes[j]) + f[j].times(primes[i])
            plan.xm_integrands[f"M_{i}{j}"] = target
            relation = self._relation(report, f"M_{i}{j} = E I + g", target, basis)
            if not relation.exists:
                return self._obstructed(report, f"M_{i}{j} has no Ostrowski relation with the I")
            rows.append([relation.coefficients[f"I_{c}"] for c in order])
        return self._symmetry_gate(report, rows)

    def _ex2_rank_two(self, report, plan, psi: Dict[str, Relation], rank: RankResult) -> ObstructionReport:
        primes = plan.i_prime
        i, j = rank.basis
        h = next(name for name in ("alpha", "beta", "gamma") if name not in rank.basis)
        dep = rank.relations[h]
        a, b = dep.coefficients[f"I_{i}"], dep.coefficients[f"I_{j}"]
        kappa = dep.algebraic_part

        def row(name):
            return [psi[name].coefficients[f"I_{i}"], psi[name].coefficients[f"I_{j}"]]

        D = [row(i), row(j), row(h)]
        d, x = D[0]
        y, d_j = D[1]
        shaped = d == d_j and D[2] == [a * d - b * y, b * d - a * x]
        report.matrix_checks.append(MatrixCheck("D", D, shaped))
        self._link(report, "D-shape", "D = [[d, x], [y, d], [ad - by, bd - ax]]", holds=shaped)
        if not shaped:
            return self._obstructed(report, "rank two needs D of the form [[d, x], [y, d], [ad - by, bd - ax]]")

        f_i, f_j = psi[i].algebraic_part, psi[j].algebraic_part
        f_h = psi[h].algebraic_part + kappa.scale(-d)
        Ii, Ij = primes[i], primes[j]
        n_ij = f_j.scale(-1).times(Ii) + f_i.scale(-1).times(Ij)
        n_jh = (
            kappa.scale(y).times(Ii)
            + _product(kappa, f_j.derivative())
            + f_j.scale(-a).times(Ii)
            + (f_h + f_j.scale(b)).scale(-1).times(Ij)
        )
        n_ih = (
            kappa.scale(x).times(Ij)
            + _product(kappa, f_i.derivative())
            + (f_h + f_i.scale(a)).scale(-1).times(Ii)
            + f_i.scale(-b).times(Ij)
        )
        basis = {f"I_{i}": [Ii], f"I_{j}": [Ij]}
        rows = []
        for label, target in (
            (f"N_{j}{h} + a N_{i}{j}", n_jh + [t.scale(a) for t in n_ij]),
            (f"N_{i}{h} + b N_{i}{j}", n_ih + [t.scale(b) for t in n_ij]),
        ):
            plan.xm_integrands[label] = target
            relation = self._relation(report, label, target, basis)
            if not relation.exists:
                return self._obstructed(report, f"{label} has no Ostrowski relation with I_{i} and I_{j}")
            rows.append([relation.coefficients[f"I_{i}"], relation.coefficients[f"I_{j}"]])
        return self._symmetry_gate(report, rows)

    def _ex2_rank_one(self, report, plan, psi: Dict[str, Relation], rank: RankResult) -> ObstructionReport:
        base = rank.basis[0]
        Ib = plan.i_prime[base]
        theta = {base: Rational(1)}
        kappa = {base: ClosedForm()}
        for name, relation in rank.relations.items():
            theta[name] = relation.coefficients[f"I_{base}"]
            kappa[name] = relation.algebraic_part
        d = {name: psi[name].coefficients[f"I_{base}"] for name in psi}
        f = {name: psi[name].algebraic_part for name in psi}

        def n_prime(u: str, v: str) -> List[Term]:
            factor = kappa[v].scale(d[u]) + kappa[u].scale(d[v]) + f[v].scale(-theta[u]) + f[u].scale(-theta[v])
            return factor.times(Ib) + _product(kappa[v], f[u].derivative()) + _product(kappa[u], f[v].derivative())

        target = n_prime("beta", "gamma")
        target += [t.scale(theta["beta"]) for t in n_prime("gamma", "alpha")]
        target += [t.scale(theta["gamma"]) for t in n_prime("alpha", "beta")]
        plan.xm_integrands["N"] = target
        relation = self._relation(report, f"N = e I_{base}^2 / 2 + c I_{base}", target, {f"I_{base}": [Ib]})
        if relation.exists:
            return self._finish(report, Status.NO_OBSTRUCTION_FOUND, "rank one criterion satisfied")
        return self._obstructed(report, "rank one: N is not algebraic modulo I")

    # -- audit ----------------------------------------------------------------------

    def audit(self, report: ObstructionReport) -> bool:
        """Replay the checkable links; a failing link downgrades the report to Inconclusive."""
        if report.status is Status.OBSTRUCTED_EXACT and report.rigor != "exact":
            self._finish(report, Status.INCONCLUSIVE, "audit: exact obstruction with a numeric link")
            return False
        for link in report.certificate:
            if link.check is None:
                continue
            try:
                ok = bool(link.check())
            except VeilError as e:
                logger.warning("audit of %s raised %s", link.step, e)
                ok = False
            if not ok:
                logger.warning("audit failed at %s for %s k=%s", link.step, report.system, report.k)
                self._finish(report, Status.INCONCLUSIVE, f"audit failed at step {link.step}")
                return False
        return True
