"""MCP tools for exponent tables and the EX2 census."""

from typing import Any, Dict
import logging

from server import mcp
from services import tables_service
from transformers.report_transformer import ReportTransformer
from exceptions import ValidationError, VeilError

logger = logging.getLogger(__name__)


@mcp.tool()
def reproduce_table(which: str, k: int) -> Dict[str, Any]:
    """
    Regenerate an exponent table and diff it against the bundled values.

    **Best for:** Checking the exponent bookkeeping behind the VE2 tests for a given degree.
    **Not recommended for:** Deciding a particular pair of eigenvalues (use analyze_ve2).
    **Common mistakes:** Table names are case sensitive: "I", "phialg", "psialpha", "psigamma", "Idep".
    **Prompt Example:** "Reproduce the Phi algebraicity table for k = 7"
    **Usage Example:**
    ```json
    {
      "name": "reproduce_table",
      "arguments": {"which": "phialg", "k": 7}
    }
    ```
    **Tool Relationships:** Complements analyze_ve2: the "alg" cells are those where Phi is
    algebraic whatever p is.
    **Returns:** Rows of cells (label and kernel exponents) and the list of mismatching cells.

    Parameters
    ----------
    which : str
        Table name.
    k : int
        Degree of the potential, |k| >= 3.

    Returns
    -------
    dict
        Dictionary containing:
        - status: "success" or "error"
        - table: rows, mismatches and a matches flag
    """
    try:
        rows = tables_service.build_table(which, k)
        mismatches = tables_service.diff_table(which, k)
        return {"status": "success", "table": ReportTransformer.transform_table(which, k, rows, mismatches)}
    except ValidationError as e:
        logger.warning(f"Validation error: {e}")
        return {"status": "error", "error": str(e), "field": e.field}
    except VeilError as e:
        logger.error(f"Table reproduction failed: {e}")
        return {"status": "error", "error": str(e)}


@mcp.tool()
def ex2_census(k: int) -> Dict[str, Any]:
    """
    Count the EX2 case triples whose Phi is algebraic by an integer exponent.

    **Best for:** An overview of which of the 64 (gamma, beta, alpha) case triples need the
    deep Ostrowski stage.
    **Not recommended for:** Deciding a single triple.
    **Prompt Example:** "How many EX2 case triples have an integer exponent for k = 5?"
    **Usage Example:**
    ```json
    {
      "name": "ex2_census",
      "arguments": {"k": 5}
    }
    ```
    **Returns:** Counts (E0_int, E1_int, both, algebraic_by_exponent, possibly_transcendental,
    all_algebraic), the triple lists and the Delta rows.

    Parameters
    ----------
    k : int
        Degree of the potential, |k| >= 3.

    Returns
    -------
    dict
        Dictionary containing:
        - status: "success" or "error"
        - census: counts and lists
    """
    try:
        return {"status": "success", "census": ReportTransformer.transform_census(tables_service.ex2_census(k))}
    except VeilError as e:
        logger.error(f"Census failed: {e}")
        return {"status": "error", "error": str(e)}
