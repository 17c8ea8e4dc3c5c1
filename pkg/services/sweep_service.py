"""Grid sweeps of the obstruction engine over ranges of the line-2 parameter p."""

from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Tuple

from sympy import Rational

from config.reference_tables import VE2_PROBABILITIES
from config.settings import get_config
from exceptions import ValidationError, VeilError
from services.numeric_oracle import PrecisionContext
from services.obstruction_engine import ObstructionService, Status, letter_of
from services.spectrum_classifier import _check_degree, jordan_case, lambda_of
from transformers.report_transformer import ReportTransformer
from utils.logging import get_logger

logger = get_logger(__name__)

MODES = ("ve2", "ex2")
FORMATS = ("json", "csv")
INDICES = {"ve2": ("gamma", "alpha"), "ex2": ("gamma", "beta", "alpha")}

__all__ = ["SweepConfig", "SweepResult", "letter_of", "parse_range", "run_sweep", "summarize"]


def parse_range(text: str) -> Tuple[int, int]:
    """Parse "A..B" into an inclusive integer interval; A > B is the empty range."""
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise ValidationError("p_range", text, "expected an interval like -6..7") from None


@dataclass
class SweepConfig:
    """Sweep settings with validation."""

    k: int
    p_range: Tuple[int, int]
    mode: str = "ve2"
    bits: int = 256
    format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        """Validate configuration after initialization."""
        _check_degree(self.k)
        if self.mode not in MODES:
            raise ValidationError("mode", self.mode, f"mode must be one of {', '.join(MODES)}")
        if self.format not in FORMATS:
            raise ValidationError("format", self.format, f"format must be one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise ValidationError("jobs", self.jobs, "at least one worker is required")
        PrecisionContext(working_bits=self.bits)

    @classmethod
    def from_defaults(cls, k: int, p_range: Tuple[int, int], **overrides: Any) -> "SweepConfig":
        """Fill bits and jobs from the application config."""
        config = get_config()
        overrides.setdefault("bits", config.precision.bits)
        overrides.setdefault("jobs", config.execution.jobs)
        return cls(k=k, p_range=p_range, **overrides)

    @property
    def parameters(self) -> List[int]:
        lo, hi = self.p_range
        return list(range(lo, hi + 1))

    def cells(self) -> List[Tuple[int, ...]]:
        return list(product(self.parameters, repeat=len(INDICES[self.mode])))


@dataclass
class SweepResult:
    config: SweepConfig
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


def _analyze_cell(job: Tuple[int, str, int, int, Tuple[int, ...]]) -> Dict[str, Any]:
    """Worker entry point; returns a plain dict so results cross process boundaries."""
    index, mode, k, bits, ps = job
    row: Dict[str, Any] = {"index": index, "p": list(ps), "cases": [jordan_case(p) for p in ps]}
    try:
        service = ObstructionService(PrecisionContext(working_bits=bits))
        lambdas = [lambda_of(k, p) for p in ps]
        report = service.analyze_ve2(k, *lambdas) if mode == "ve2" else service.analyze_ex2(k, *lambdas)
        service.audit(report)
        payload = ReportTransformer.transform_report(report)
        row.update(
            status=report.status.value,
            rigor=report.rigor,
            reason=report.reason,
            letter=report.letter,
            phi_algebraic=report.phi.algebraic if report.phi else None,
            report=payload,
        )
    except VeilError as e:
        logger.error("sweep cell %s failed: %s", ps, e)
        row.update(status="error", reason=str(e))
    return row


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run the analyzer over the p-grid and merge the rows in cell order."""
    jobs = [(i, cfg.mode, cfg.k, cfg.bits, ps) for i, ps in enumerate(cfg.cells())]
    logger.info("Sweep %s k=%s over %d cells with %d workers", cfg.mode, cfg.k, len(jobs), cfg.jobs)
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_analyze_cell, jobs, chunksize=max(1, len(jobs) // (4 * cfg.jobs))))
    else:
        rows = [_analyze_cell(job) for job in jobs]
    rows.sort(key=lambda row: row["index"])
    return SweepResult(config=cfg, rows=rows, summary=summarize(cfg.mode, rows))


def summarize(mode: str, rows: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Status counts, per-letter outcomes and, for VE2, the case-cell obstruction fractions."""
    statuses = Counter(row["status"] for row in rows)
    summary: Dict[str, Any] = {"cells": len(rows), "statuses": dict(sorted(statuses.items()))}
    if mode != "ve2" or not rows:
        return summary

    letters: Dict[str, Counter] = defaultdict(Counter)
    by_case: Dict[Tuple[int, ...], List[Dict[str, Any]]] = defaultdict(list)
    for row in rows:
        if row["status"] == "error":
            continue
        letters[row.get("letter") or "Phi"][row["status"]] += 1
        by_case[tuple(row["cases"])].append(row)

    obstructed = {Status.OBSTRUCTED_EXACT.value, Status.OBSTRUCTED_NUMERIC.value}
    p_phi = p_alg = Rational(0)
    for cell_rows in by_case.values():
        weight = Rational(1, len(cell_rows))
        for row in cell_rows:
            if row["status"] not in obstructed:
                continue
            if row.get("phi_algebraic"):
                p_alg += weight
            else:
                p_phi += weight
    covered = len(by_case)
    if not covered:
        return summary
    observed = {"p_phi": p_phi / covered, "p_alg": p_alg / covered, "p_total": (p_phi + p_alg) / covered}
    summary["letters"] = {letter: dict(sorted(counts.items())) for letter, counts in sorted(letters.items())}
    summary["case_cells"] = covered
    summary["probabilities"] = {
        name: {
            "observed": ReportTransformer.render_rational(observed[name]),
            "expected": ReportTransformer.render_rational(VE2_PROBABILITIES[name]),
            "cell_weight": ReportTransformer.render_rational(Rational(1, covered)),
        }
        for name in VE2_PROBABILITIES
    }
    return summary
