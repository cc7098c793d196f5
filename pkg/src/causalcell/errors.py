"""Exception hierarchy.

Input problems derive from ``ValueError`` (the CLI maps them to exit code 2);
numerical failures derive from ``NumericalFailure`` (exit code 3).
"""


class CausalCellError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(CausalCellError, ValueError):
    pass


class NonHermitianInput(InvalidInput):
    pass


class NonUnitaryInput(InvalidInput):
    pass


class NonDiagonalEnvironment(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class NotPSD(InvalidInput):
    pass


class IncompleteKraus(InvalidInput):
    pass


class NegativeTime(InvalidInput):
    pass


class GridNotAscending(InvalidInput):
    pass


class NonPositiveOmega(InvalidInput):
    pass


class InfeasibleTarget(InvalidInput):
    pass


class DomainError(InvalidInput):
    pass


class NumericalFailure(CausalCellError, RuntimeError):
    pass


class NoRescueFound(NumericalFailure):
    """No return to the charged state was found inside the search window."""

    def __init__(self, message: str, best_fidelity: float, best_time: float):
        super().__init__(message)
        self.best_fidelity = best_fidelity
        self.best_time = best_time
