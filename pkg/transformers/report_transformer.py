"""Transformer for engine results: canonical JSON payloads and CSV rows."""

import csv
import io
import json
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

import mpmath as mp
from sympy import Rational

from services.numeric_oracle import NumericValue
from services.obstruction_engine import ObstructionReport, Relation
from services.spectrum_classifier import SpectralClass
from services.tables_service import CensusRecord, Cell, Mismatch
from utils.logging import get_logger

logger = get_logger(__name__)

SCHEMA = "veil/1"
DIGITS = 30


class ReportTransformer:
    """Render engine objects as plain JSON-ready structures with stable ordering."""

    @staticmethod
    def _remove_nulls(data: Any) -> Any:
        """
        Recursively remove null values and empty containers from dictionaries and lists.

        Args:
            data: Data structure to clean.

        Returns:
            Cleaned data structure.
        """
        if isinstance(data, dict):
            return {
                k: ReportTransformer._remove_nulls(v) for k, v in data.items() if v is not None and v != [] and v != {}
            }
        elif isinstance(data, list):
            return [ReportTransformer._remove_nulls(item) for item in data if item is not None]
        return data

    @staticmethod
    def render_rational(q: Any) -> str:
        """Canonical "num/den" rendering, "-1/3", "2/1"."""
        q = Rational(q)
        return f"{q.p}/{q.q}"

    @staticmethod
    def render_numeric(value: Any, bits: Optional[int] = None, bound: Any = None) -> Dict[str, Any]:
        return {
            "value": mp.nstr(value, DIGITS),
            "bits": bits,
            "bound": None if bound is None else mp.nstr(bound, 5),
            "rigor": "numeric",
        }

    @staticmethod
    def render(value: Any) -> Any:
        """Recursively turn rationals, mpmath numbers, enums and tuples into JSON values."""
        if isinstance(value, bool) or value is None or isinstance(value, str):
            return value
        if isinstance(value, int):
            return value
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, Rational):
            return ReportTransformer.render_rational(value)
        if isinstance(value, NumericValue):
            return ReportTransformer.render_numeric(value.value, value.bits, value.bound)
        if isinstance(value, (mp.mpf, mp.mpc)):
            return ReportTransformer.render_numeric(value)
        if isinstance(value, dict):
            return {str(k): ReportTransformer.render(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [ReportTransformer.render(v) for v in value]
        return str(value)

    @staticmethod
    def transform_class(cls: SpectralClass) -> Dict[str, Any]:
        """
        Transform a classification into its JSON form.

        Args:
            cls: Classified eigenvalue.

        Returns:
            Dictionary with the table line, Jordan data and, for conflicts, the finite line.
        """
        transformed = {
            "k": cls.k,
            "lambda": ReportTransformer.render_rational(cls.lam),
            "line": cls.line.value,
            "p": cls.p,
            "case": cls.jcase,
            "a": cls.a,
            "b": cls.b,
            "alpha": cls.alpha,
            "beta": cls.beta,
            "n": cls.n,
            "eps": cls.eps,
            "finite_line": cls.finite_line,
            "finite_p": cls.finite_p,
            "conflict": cls.conflict if cls.conflict else None,
        }
        return ReportTransformer._remove_nulls(ReportTransformer.render(transformed))

    @staticmethod
    def _transform_relation(relation: Relation) -> Dict[str, Any]:
        if relation.is_exact:
            coefficients = {name: ReportTransformer.render(c) for name, c in relation.coefficients.items()}
        else:
            coefficients = {
                name: ReportTransformer.render_numeric(c, relation.bits, relation.residual)
                for name, c in relation.coefficients.items()
            }
        return {
            "name": relation.name,
            "exists": relation.exists,
            "coefficients": coefficients,
            "rigor": relation.rigor,
            "system_size": relation.system_size,
        }

    @staticmethod
    def transform_report(report: ObstructionReport) -> Dict[str, Any]:
        """
        Transform an obstruction report into the versioned JSON payload.

        Args:
            report: Report produced by the obstruction engine.

        Returns:
            Dictionary with schema tag, input echo, verdicts, relations, matrix checks and certificate.
        """
        render = ReportTransformer.render
        transformed = {
            "schema": SCHEMA,
            "system": report.system,
            "k": report.k,
            "eigenvalues": render(report.eigenvalues),
            "classes": {name: ReportTransformer.transform_class(cls) for name, cls in report.classes.items()},
            "status": report.status.value,
            "rigor": report.rigor,
            "reason": report.reason,
            "letter": report.letter,
            "exceptional": report.exceptional,
            "rank": report.rank,
            "phi": render(vars(report.phi)) if report.phi else None,
            "psi": {name: render(vars(v)) for name, v in report.psi.items()},
            "ostrowski": [ReportTransformer._transform_relation(r) for r in report.ostrowski],
            "matrix_checks": [
                {"name": m.name, "entries": render(m.entries), "symmetric": m.symmetric, "rigor": m.rigor}
                for m in report.matrix_checks
            ],
            "characters": render(report.characters),
            "certificate": [
                {"step": link.step, "claim": link.claim, "rigor": link.rigor, "holds": link.holds}
                for link in report.certificate
            ],
            "assumptions": list(report.assumptions),
        }
        return ReportTransformer._remove_nulls(transformed)

    @staticmethod
    def _transform_cell(cell: Cell) -> Dict[str, Any]:
        return ReportTransformer._remove_nulls({"label": cell.label, "e0": cell.e0, "e1": cell.e1})

    @staticmethod
    def transform_table(which: str, k: int, rows: Sequence[Sequence[Cell]], mismatches: Sequence[Mismatch]) -> Dict[str, Any]:
        render = ReportTransformer.render
        return {
            "schema": SCHEMA,
            "table": which,
            "k": k,
            "rows": [[render(ReportTransformer._transform_cell(c)) for c in row] for row in rows],
            "mismatches": [
                {
                    "row": m.row,
                    "col": m.col,
                    "expected": render(ReportTransformer._transform_cell(m.expected)),
                    "got": render(ReportTransformer._transform_cell(m.got)),
                }
                for m in mismatches
            ],
            "matches": not mismatches,
        }

    @staticmethod
    def transform_census(record: CensusRecord) -> Dict[str, Any]:
        render = ReportTransformer.render
        return {
            "schema": SCHEMA,
            "k": record.k,
            "counts": dict(record.counts),
            "e0_integer": render(record.e0_integer),
            "e1_integer": render(record.e1_integer),
            "both_integer": render(record.both_integer),
            "all_algebraic": render(record.all_algebraic),
            "delta_rows": render(record.delta_rows),
        }

    @staticmethod
    def to_json(payload: Any) -> str:
        """Byte-stable JSON: sorted keys, UTF-8 text."""
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)

    @staticmethod
    def to_csv(rows: Iterable[Dict[str, Any]], columns: List[str]) -> str:
        """Flat CSV with the given column order; nested values are JSON-encoded."""
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    c: json.dumps(row.get(c), sort_keys=True) if isinstance(row.get(c), (dict, list)) else row.get(c)
                    for c in columns
                }
            )
        return buffer.getvalue()
