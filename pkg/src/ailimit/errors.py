"""Exception hierarchy shared across the package."""


class AiLimitError(Exception):
    """Base class for all package-specific failures."""


class InvalidInput(AiLimitError):
    """Malformed user input (bad symbol string, bad grid spec, ...)."""


class NumericalFailure(AiLimitError):
    """A numerical procedure could not produce a usable result."""


class BranchUndefined(NumericalFailure):
    """A branch map was evaluated where its radicand is not positive."""


class IntervalUndefined(NumericalFailure):
    """No trapping interval is defined for the requested parameters."""


class ConvergenceFailure(NumericalFailure):
    """Fixed-point iteration did not converge within its step budget."""


class TangentFailure(NumericalFailure):
    """The bordered tangent system is singular."""


class CorrectorFailure(NumericalFailure):
    """The arclength corrector failed to converge or diverged."""


class DivergedOrbit(NumericalFailure):
    """An orbit left the bounded region during iteration."""
