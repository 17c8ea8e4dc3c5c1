from typing import Optional, Dict, Any


class VeilError(Exception):
    """Base exception for integrability-engine errors."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        exit_code: int = 2,
    ):
        self.message = message
        self.details = details or {}
        self.exit_code = exit_code
        super().__init__(self.message)

    def __str__(self):
        if self.details:
            return f"{self.message} (Details: {self.details})"
        return self.message


class ValidationError(VeilError):
    """Raised when input validation fails."""

    def __init__(self, field: str, value: Any, message: str):
        self.field = field
        self.value = value
        super().__init__(f"Validation failed for {field}", {"message": message})


class DomainError(VeilError):
    """Raised for a potential degree outside |k| >= 3."""

    def __init__(self, k: int):
        self.k = k
        super().__init__(f"Degree k={k} is out of scope", {"message": "only |k| >= 3 is supported"})


class RootOutsideUnitInterval(VeilError):
    """A Jacobi polynomial has a root at, or outside of, the interval (0, 1)."""

    pass


class MultipleRoot(VeilError):
    """A Jacobi polynomial has a repeated root."""

    pass


class ExponentSumInteger(VeilError):
    """Raised when e0 + e1 is an integer, so the triangular reduction does not apply."""

    def __init__(self, e0: Any, e1: Any):
        self.e0 = e0
        self.e1 = e1
        super().__init__("Exponent sum is an integer", {"e0": str(e0), "e1": str(e1)})


class NonSquarefreeJ(VeilError):
    """The denominator polynomial is not squarefree or vanishes at an endpoint."""

    pass


class IncompatibleKernelClass(VeilError):
    """Two integrands have kernels whose exponents do not differ by integers."""

    pass


class PathHitsPole(VeilError):
    """A quadrature path passes through a root of the denominator."""

    pass


class PrecisionNotReached(VeilError):
    """Raised when the requested tolerance was not met after refinement."""

    def __init__(self, best: Any, bound: Any):
        self.best = best
        self.bound = bound
        super().__init__("Requested precision not reached", {"bound": str(bound)})


class Underdetermined(VeilError):
    """Not enough independent functionals to fix a relation."""

    pass


class Unstable(VeilError):
    """A numeric relation did not survive the precision-doubling check."""

    pass


class OutOfScope(VeilError):
    """An input the second-level engine does not cover, such as a non line-2 eigenvalue."""

    pass
