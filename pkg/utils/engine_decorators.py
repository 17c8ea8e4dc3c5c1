import functools
from typing import Any, Callable, TypeVar

from mpmath.libmp import NoConvergence
from sympy.polys.polyerrors import PolynomialError

from exceptions import PrecisionNotReached, VeilError
from utils.logging import get_logger

logger = get_logger(__name__)
F = TypeVar("F", bound=Callable[..., Any])


def handle_engine_errors(func: F) -> F:
    """Decorator translating low-level sympy/mpmath failures into VeilError."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except VeilError:
            raise
        except NoConvergence as e:
            error = PrecisionNotReached(best=None, bound=str(e))
            logger.error("No convergence in %s: %s", func.__name__, e, exc_info=True)
            raise error from e
        except ZeroDivisionError as e:
            error = VeilError(f"Division by zero in {func.__name__}", details={"error": str(e)})
            logger.error("Exact arithmetic error: %s", error, exc_info=True)
            raise error from e
        except PolynomialError as e:
            error = VeilError(f"Polynomial arithmetic failed in {func.__name__}", details={"error": str(e)})
            logger.error("Polynomial error: %s", error, exc_info=True)
            raise error from e

    return wrapper  # type: ignore
