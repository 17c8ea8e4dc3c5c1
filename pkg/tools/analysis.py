"""MCP tools for eigenvalue classification and second-order obstruction analysis."""

from typing import Any, Dict, Optional
import logging

from server import mcp
from services import spectrum_classifier
from services.numeric_oracle import PrecisionContext
from services.obstruction_engine import ObstructionService
from transformers.report_transformer import ReportTransformer
from config.settings import get_config
from exceptions import ValidationError, VeilError

logger = logging.getLogger(__name__)

# Initialize services
config = get_config()
obstruction_service = ObstructionService(PrecisionContext.from_config(config.precision))


def _eigenvalue(k: int, lam: Optional[str], p: Optional[int], field: str) -> Any:
    """An eigenvalue given either as an exact rational string or through its line-2 parameter."""
    if (lam is None) == (p is None):
        raise ValidationError(field, lam, "give exactly one of the eigenvalue or its parameter p")
    return spectrum_classifier.lambda_of(k, p) if p is not None else lam


@mcp.tool()
def classify_eigenvalue(k: int, lam: str) -> Dict[str, Any]:
    """
    Classify an eigenvalue of the Hessian against the Morales-Ramis table.

    **Best for:** Checking which line an eigenvalue lies on, recovering p and the Jordan case
    of an additive-group eigenvalue before running the second-order tests.
    **Not recommended for:** Floating point eigenvalues; degrees |k| <= 2.
    **Common mistakes:** Passing a rounded decimal such as "0.333" for 1/3; decimals are read exactly.
    **Prompt Example:** "Which table line does lambda = 1/8 fall on for k = 3?"
    **Usage Example:**
    ```json
    {
      "name": "classify_eigenvalue",
      "arguments": {"k": 3, "lam": "1/8"}
    }
    ```
    **Tool Relationships:** Use before analyze_ve2/analyze_ex2 to see whether an input is in scope.
    **Returns:** Line (Line2, Finite, NotInTable), p, Jordan case, exponents and Jacobi data.

    Parameters
    ----------
    k : int
        Degree of the homogeneous potential, |k| >= 3.
    lam : str
        Eigenvalue as an exact rational, e.g. "7" or "-1/24".

    Returns
    -------
    dict
        Dictionary containing:
        - status: "success" or "error"
        - classification: line, p, case and the Jordan data
    """
    try:
        cls = spectrum_classifier.classify_eigenvalue(k, lam)
        return {"status": "success", "classification": ReportTransformer.transform_class(cls)}
    except ValidationError as e:
        logger.warning(f"Validation error: {e}")
        return {"status": "error", "error": str(e), "field": e.field}
    except VeilError as e:
        logger.error(f"Classification failed: {e}")
        return {"status": "error", "error": str(e)}


@mcp.tool()
def analyze_ve2(
    k: int,
    lambda_gamma: Optional[str] = None,
    lambda_alpha: Optional[str] = None,
    p_gamma: Optional[int] = None,
    p_alpha: Optional[int] = None,
) -> Dict[str, Any]:
    """
    Run the second variational equation test for two blocks gamma and alpha.

    **Best for:** Deciding whether the VE2 of a homogeneous potential can be virtually Abelian
    when VE1 passes, with an exact certificate whenever possible.
    **Not recommended for:** Large grids (use the sweep command); eigenvalues off line 2, which
    come back OutOfScope or VirtuallyAbelian without any integral being computed.
    **Common mistakes:** Giving both lambda_gamma and p_gamma; swapping gamma and alpha (the
    test is not symmetric).
    **Prompt Example:** "Is VE2 obstructed for k = 5 with p_gamma = 2 and p_alpha = -2?"
    **Usage Example:**
    ```json
    {
      "name": "analyze_ve2",
      "arguments": {"k": 5, "p_gamma": 3, "p_alpha": 1}
    }
    ```
    **Tool Relationships:** Use classify_eigenvalue first to inspect inputs; analyze_ex2 for
    three distinct blocks.
    **Returns:** Versioned report with status, reason, the Phi and Psi verdicts, every Ostrowski
    relation tested and the certificate chain.

    Parameters
    ----------
    k : int
        Degree of the potential.
    lambda_gamma, lambda_alpha : str, optional
        Eigenvalues as exact rationals.
    p_gamma, p_alpha : int, optional
        Line-2 parameters used instead of the eigenvalues.

    Returns
    -------
    dict
        Dictionary containing:
        - status: "success" or "error"
        - report: the obstruction report (schema veil/1)
    """
    try:
        report = obstruction_service.analyze_ve2(
            k, _eigenvalue(k, lambda_gamma, p_gamma, "gamma"), _eigenvalue(k, lambda_alpha, p_alpha, "alpha")
        )
        obstruction_service.audit(report)
        logger.info(f"VE2 analysis finished with {report.status.value}")
        return {"status": "success", "report": ReportTransformer.transform_report(report)}
    except ValidationError as e:
        logger.warning(f"Validation error: {e}")
        return {"status": "error", "error": str(e), "field": e.field}
    except VeilError as e:
        logger.error(f"VE2 analysis failed: {e}")
        return {"status": "error", "error": str(e)}


@mcp.tool()
def analyze_ex2(
    k: int,
    lambda_gamma: Optional[str] = None,
    lambda_beta: Optional[str] = None,
    lambda_alpha: Optional[str] = None,
    p_gamma: Optional[int] = None,
    p_beta: Optional[int] = None,
    p_alpha: Optional[int] = None,
) -> Dict[str, Any]:
    """
    Run the three-index second-order test for the blocks gamma, beta and alpha.

    **Best for:** Potentials with at least three line-2 eigenvalues, where the coupled system
    carries more obstructions than VE2 alone.
    **Not recommended for:** Two-block problems (use analyze_ve2).
    **Common mistakes:** Mixing eigenvalues and parameters for the same index.
    **Prompt Example:** "Check the EX2 system for k = 3 with all eigenvalues equal to 1/8"
    **Usage Example:**
    ```json
    {
      "name": "analyze_ex2",
      "arguments": {"k": 3, "lambda_gamma": "1/8", "lambda_beta": "1/8", "lambda_alpha": "1/8"}
    }
    ```
    **Tool Relationships:** Pair with ex2_census to see which case triples are decided by
    exponents alone.
    **Returns:** Versioned report with status, rank of the first-level integrals, the D and E
    matrix checks and the certificate chain.

    Parameters
    ----------
    k : int
        Degree of the potential.
    lambda_gamma, lambda_beta, lambda_alpha : str, optional
        Eigenvalues as exact rationals.
    p_gamma, p_beta, p_alpha : int, optional
        Line-2 parameters used instead of the eigenvalues.

    Returns
    -------
    dict
        Dictionary containing:
        - status: "success" or "error"
        - report: the obstruction report (schema veil/1)
    """
    try:
        report = obstruction_service.analyze_ex2(
            k,
            _eigenvalue(k, lambda_gamma, p_gamma, "gamma"),
            _eigenvalue(k, lambda_beta, p_beta, "beta"),
            _eigenvalue(k, lambda_alpha, p_alpha, "alpha"),
        )
        obstruction_service.audit(report)
        logger.info(f"EX2 analysis finished with {report.status.value}")
        return {"status": "success", "report": ReportTransformer.transform_report(report)}
    except ValidationError as e:
        logger.warning(f"Validation error: {e}")
        return {"status": "error", "error": str(e), "field": e.field}
    except VeilError as e:
        logger.error(f"EX2 analysis failed: {e}")
        return {"status": "error", "error": str(e)}
