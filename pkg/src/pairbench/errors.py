"""Exception hierarchy shared across the package."""


class PairbenchError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(PairbenchError, ValueError):
    pass


class UnidentifiableModelError(PairbenchError, ValueError):
    """Comparison data does not determine finite Bradley-Terry scores."""


class DegenerateVarianceError(PairbenchError, ValueError):
    pass


class TooFewPointsError(PairbenchError, ValueError):
    pass


class UndefinedCorrelationError(PairbenchError, ValueError):
    """Correlation requested for a constant (zero-variance) vector."""


class InvalidStateError(PairbenchError, RuntimeError):
    pass


class ProtocolViolationError(PairbenchError, RuntimeError):
    """An outcome was recorded for a pair the sampler never issued."""
