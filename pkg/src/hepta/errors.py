"""Exception types shared across the package."""


class HeptaError(Exception):
    """Base class for all errors raised by :mod:`hepta`."""


class InvalidSpecError(HeptaError, ValueError):
    """The matrix parameters do not describe a valid member of the family."""


class FormulaInapplicableError(HeptaError):
    """A closed-form eigenvector formula cannot be used for this eigenvalue.

    ``hypothesis`` names the failed precondition: ``"pole-collision"``,
    ``"vartheta-zero"`` or ``"denominator-sum"``.
    """

    def __init__(self, hypothesis: str, message: str):
        super().__init__(message)
        self.hypothesis = hypothesis


class SingularLambdaError(HeptaError, ZeroDivisionError):
    """Some sine-basis eigenvalue ``lambda_k`` vanishes (``k`` is 1-based)."""

    def __init__(self, k: int, value: float):
        super().__init__(f"lambda_{k} = {value!r} vanishes; structured inverse undefined")
        self.k = k
        self.value = value


class SingularStructureError(HeptaError, ZeroDivisionError):
    """The rank-2 update scalar of one parity block is (numerically) zero."""

    def __init__(self, which: str, value: float):
        name = "rho" if which == "odd" else "varrho"
        super().__init__(f"{name} = {value!r} for the {which} block; matrix is singular")
        self.which = which
        self.value = value


class SingularMatrixError(HeptaError, ZeroDivisionError):
    """Dense LU met a zero pivot."""


class ConvergenceError(HeptaError, RuntimeError):
    """An iterative oracle routine failed to converge."""
