"""Command line entry point: classify, ve2, ex2, tables, census and sweep.

Exit codes: 0 completed (whatever the status), 1 table mismatch, 2 usage or domain error.
Negative values must be attached with "=", e.g. ``--p-range=-6..7`` or ``--lambda=-1/24``.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

from config.settings import get_config
from exceptions import DomainError, ValidationError, VeilError
from services import spectrum_classifier, tables_service
from services.numeric_oracle import PrecisionContext
from services.obstruction_engine import ObstructionService
from services.sweep_service import SweepConfig, parse_range, run_sweep
from transformers.report_transformer import SCHEMA, ReportTransformer
from utils.logging import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

SWEEP_COLUMNS = ["index", "p", "cases", "letter", "status", "rigor", "reason"]


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info("wrote %s", out)
    else:
        sys.stdout.write(text + "\n")


def _eigenvalues(args: argparse.Namespace, k: int, names: Sequence[str]) -> List[Any]:
    """Eigenvalues from --lambda, the per-index --lambda-* flags or the --p-* parameters."""
    if args.lam:
        if len(args.lam) != len(names):
            raise ValidationError("lambda", args.lam, f"expected {len(names)} eigenvalues")
        return list(args.lam)
    values = []
    for name in names:
        lam, p = getattr(args, f"lambda_{name}"), getattr(args, f"p_{name}")
        if (lam is None) == (p is None):
            raise ValidationError(name, lam, f"give exactly one of --lambda-{name} or --p-{name}")
        values.append(spectrum_classifier.lambda_of(k, p) if p is not None else lam)
    return values


def cmd_classify(args: argparse.Namespace) -> int:
    if (args.lam is None) == (args.p is None):
        raise ValidationError("lambda", args.lam, "give exactly one of --lambda or --p")
    lam = args.lam[0] if args.lam else spectrum_classifier.lambda_of(args.k, args.p)
    cls = spectrum_classifier.classify_eigenvalue(args.k, lam)
    payload = {"schema": SCHEMA, "classification": ReportTransformer.transform_class(cls)}
    _emit(ReportTransformer.to_json(payload), args.out)
    return EXIT_OK


def _analysis(args: argparse.Namespace, names: Sequence[str]) -> int:
    service = ObstructionService(PrecisionContext(working_bits=args.bits))
    lambdas = _eigenvalues(args, args.k, names)
    if len(names) == 2:
        report = service.analyze_ve2(args.k, *lambdas)
    else:
        report = service.analyze_ex2(args.k, *lambdas)
    service.audit(report)
    _emit(ReportTransformer.to_json(ReportTransformer.transform_report(report)), args.out)
    return EXIT_OK


def cmd_ve2(args: argparse.Namespace) -> int:
    return _analysis(args, ("gamma", "alpha"))


def cmd_ex2(args: argparse.Namespace) -> int:
    return _analysis(args, ("gamma", "beta", "alpha"))


def cmd_tables(args: argparse.Namespace) -> int:
    rows = tables_service.build_table(args.which, args.k)
    mismatches = tables_service.diff_table(args.which, args.k)
    _emit(ReportTransformer.to_json(ReportTransformer.transform_table(args.which, args.k, rows, mismatches)), args.out)
    return EXIT_MISMATCH if mismatches else EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    record = tables_service.ex2_census(args.k)
    _emit(ReportTransformer.to_json(ReportTransformer.transform_census(record)), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = SweepConfig(
        k=args.k, p_range=parse_range(args.p_range), mode=args.mode, bits=args.bits, format=args.format, jobs=args.jobs
    )
    result = run_sweep(cfg)
    if cfg.format == "csv":
        _emit(ReportTransformer.to_csv(result.rows, SWEEP_COLUMNS).rstrip("\n"), args.out)
    else:
        payload = {
            "schema": SCHEMA,
            "k": cfg.k,
            "mode": cfg.mode,
            "p_range": list(cfg.p_range),
            "bits": cfg.bits,
            "rows": result.rows,
            "summary": result.summary,
        }
        _emit(ReportTransformer.to_json(payload), args.out)
    if cfg.format == "csv" or args.out:
        sys.stderr.write(ReportTransformer.to_json(result.summary) + "\n")
    return EXIT_OK


def _add_eigenvalue_flags(parser: argparse.ArgumentParser, names: Sequence[str]) -> None:
    parser.add_argument("--lambda", dest="lam", nargs=len(names), metavar="L", help="Eigenvalues as exact rationals.")
    for name in names:
        parser.add_argument(f"--lambda-{name}", dest=f"lambda_{name}", help=f"Eigenvalue of the {name} block.")
        parser.add_argument(f"--p-{name}", dest=f"p_{name}", type=int, help=f"Line-2 parameter of the {name} block.")


def build_parser() -> argparse.ArgumentParser:
    config = get_config()
    parser = argparse.ArgumentParser(prog="veil", description="Second-order integrability tests for homogeneous potentials.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--k", type=int, required=True, help="Degree of the potential, |k| >= 3.")
        p.add_argument("--out", help="Write the output to this file instead of stdout.")

    p = sub.add_parser("classify", help="Classify one eigenvalue.")
    common(p)
    p.add_argument("--lambda", dest="lam", nargs=1, metavar="L", help="Eigenvalue as an exact rational.")
    p.add_argument("--p", type=int, help="Line-2 parameter instead of the eigenvalue.")
    p.set_defaults(func=cmd_classify)

    for name, names, func in (("ve2", ("gamma", "alpha"), cmd_ve2), ("ex2", ("gamma", "beta", "alpha"), cmd_ex2)):
        p = sub.add_parser(name, help=f"Run the {name.upper()} obstruction test.")
        common(p)
        _add_eigenvalue_flags(p, names)
        p.add_argument("--bits", type=int, default=config.precision.bits, help="Numeric working precision.")
        p.set_defaults(func=func)

    p = sub.add_parser("tables", help="Regenerate an exponent table and diff it against the fixture.")
    common(p)
    p.add_argument("--which", required=True, choices=tables_service.TABLES)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("census", help="EX2 exponent census of the 64 case triples.")
    common(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("sweep", help="Run the analyzer over a p-grid.")
    common(p)
    p.add_argument("--p-range", dest="p_range", required=True, help="Inclusive interval A..B.")
    p.add_argument("--mode", choices=("ve2", "ex2"), default="ve2")
    p.add_argument("--bits", type=int, default=config.precision.bits)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=config.execution.jobs)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging(get_config().logging, component="veil-cli")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except DomainError as e:
        sys.stdout.write(ReportTransformer.to_json({"schema": SCHEMA, "status": "OutOfScope", "error": str(e)}) + "\n")
        return e.exit_code
    except VeilError as e:
        logger.error("%s failed: %s", args.command, e)
        sys.stderr.write(ReportTransformer.to_json({"schema": SCHEMA, "status": "error", "error": str(e)}) + "\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
