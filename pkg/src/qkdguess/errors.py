"""Exception types shared across the package."""


class QkdGuessError(Exception):
    """Base class for all qkdguess errors."""


class DomainError(QkdGuessError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionMismatch(QkdGuessError, ValueError):
    """Matrix or state dimensions are inconsistent with the protocol."""


class SingularDirection(QkdGuessError, ValueError):
    """Measurement directions make a constraint system singular."""


# Variant spelling used where several directions are involved at once.
SingularDirections = SingularDirection


class InfeasibleRates(QkdGuessError, ValueError):
    """No valid Bell spectrum is compatible with the given error rates."""


class NoCrossing(QkdGuessError, RuntimeError):
    """A root bracket for a critical error rate could not be established."""
