"""Regenerates the exponent tables from first principles and checks them against the bundled fixtures."""

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Optional, Tuple

from sympy import Rational

from config.reference_tables import DELTA_ROWS, REFERENCE
from exceptions import ValidationError
from services.exponent_calculus import (
    KernelForm,
    case_sign,
    ex2_delta,
    ex2_phi_exponents,
    i_prime_kernel,
    is_integer,
    psi_prime_kernel,
    ve2_phi_exponents,
)
from services.spectrum_classifier import _check_degree
from utils.logging import get_logger

logger = get_logger(__name__)

CASES = (1, 2, 3, 4)
TABLES = tuple(REFERENCE)


@dataclass(frozen=True)
class Cell:
    """One table entry: a label and, for exponent tables, the kernel z^e0 (1 - z)^e1."""

    label: str
    e0: Optional[Rational] = None
    e1: Optional[Rational] = None


@dataclass(frozen=True)
class Mismatch:
    row: int
    col: int
    expected: Cell
    got: Cell


@dataclass
class CensusRecord:
    """Exponent census of the 64 case triples (gamma, beta, alpha) of EX2."""

    k: int
    counts: Dict[str, int]
    e0_integer: List[Tuple[int, int, int]] = field(default_factory=list)
    e1_integer: List[Tuple[int, int, int]] = field(default_factory=list)
    both_integer: List[Tuple[int, int, int]] = field(default_factory=list)
    all_algebraic: List[Tuple[int, int, int]] = field(default_factory=list)
    delta_rows: List[Dict[str, Any]] = field(default_factory=list)


def _kernel_cell(label: str, kf: KernelForm) -> Cell:
    return Cell(label, kf.e0, kf.e1)


def _check_which(which: str) -> None:
    if which not in REFERENCE:
        raise ValidationError("which", which, f"table must be one of {', '.join(TABLES)}")


def build_table(which: str, k: int) -> List[List[Cell]]:
    """Rows of cells for one table; rows are the gamma case, columns the alpha case.

    The I' table has a single row holding the four Jordan cases.

    Raises:
        ValidationError: If the table name is unknown.
        DomainError: If |k| < 3.
    """
    _check_which(which)
    _check_degree(k)
    if which == "I":
        return [[_kernel_cell("", i_prime_kernel(k, case)) for case in CASES]]

    rows = []
    for gamma in CASES:
        row = []
        for alpha in CASES:
            phi = ve2_phi_exponents(k, gamma, alpha)
            if which == "phialg":
                row.append(_kernel_cell("alg" if phi.has_integer_exponent else "", phi))
            elif which == "psialpha":
                row.append(_kernel_cell(*psi_prime_kernel(phi, k, alpha)))
            elif which == "psigamma":
                row.append(_kernel_cell(*psi_prime_kernel(phi, k, gamma)))
            else:
                row.append(Cell("Ind" if case_sign(gamma) != case_sign(alpha) else "?"))
        rows.append(row)
    return rows


def expected_table(which: str, k: int) -> List[List[Cell]]:
    """The bundled fixture evaluated at k."""
    _check_which(which)
    fixture = REFERENCE[which]
    if which == "I":
        return [[Cell(label, Rational(c0) + Rational(c1) / k, Rational(e1)) for label, c0, c1, e1 in fixture]]
    if which == "Idep":
        return [[Cell(label) for label in row] for row in fixture]
    return [[Cell(label, Rational(c0) + Rational(c1) / k, Rational(e1)) for label, c0, c1, e1 in row] for row in fixture]


def diff_table(which: str, k: int) -> List[Mismatch]:
    """Cells where the regenerated table differs from the fixture."""
    got, expected = build_table(which, k), expected_table(which, k)
    mismatches = [
        Mismatch(r, c, want, have)
        for r, (row_want, row_have) in enumerate(zip(expected, got))
        for c, (want, have) in enumerate(zip(row_want, row_have))
        if want != have
    ]
    if mismatches:
        logger.warning("table %s for k=%s differs in %d cells", which, k, len(mismatches))
    return mismatches


def ex2_census(k: int) -> CensusRecord:
    """Which of the 64 triples give Phi (and the three Psi) algebraic by an integer exponent."""
    _check_degree(k)
    record = CensusRecord(k=k, counts={})
    for triple in product(CASES, repeat=3):
        phi = ex2_phi_exponents(k, *triple)
        e0, e1 = is_integer(phi.e0), is_integer(phi.e1)
        if e0:
            record.e0_integer.append(triple)
        if e1:
            record.e1_integer.append(triple)
        if e0 and e1:
            record.both_integer.append(triple)
        if e0 or e1:
            psis = [psi_prime_kernel(phi, k, case)[1] for case in triple]
            if all(kf.has_integer_exponent for kf in psis):
                record.all_algebraic.append(triple)

    algebraic = len(record.e0_integer) + len(record.e1_integer) - len(record.both_integer)
    record.counts = {
        "E0_int": len(record.e0_integer),
        "E1_int": len(record.e1_integer),
        "both": len(record.both_integer),
        "algebraic_by_exponent": algebraic,
        "possibly_transcendental": 64 - algebraic,
        "all_algebraic": len(record.all_algebraic),
    }
    for name, signs, _ in DELTA_ROWS:
        delta = ex2_delta(*signs, k)
        record.delta_rows.append({"row": name, "signs": signs, "delta": delta, "integer": is_integer(delta)})
    logger.debug("EX2 census for k=%s: %s", k, record.counts)
    return record
