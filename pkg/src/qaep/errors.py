"""Exception hierarchy shared by all qaep modules."""


class QaepError(Exception):
    """Base class for every error raised by qaep."""


class CapacityError(QaepError):
    """A dense object would exceed the configured maximum dimension."""


class StructuralError(QaepError, ValueError):
    """Shapes or site dimensions do not fit together."""


class ContractError(QaepError, ValueError):
    """An input violates a documented precondition (Hermiticity, orthonormality, ...)."""


class ParameterError(QaepError, ValueError):
    """A scalar parameter is outside its documented range."""


class NumericalError(QaepError, ArithmeticError):
    """An iterative routine failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ModelError(QaepError, ValueError):
    """A source model (or model file) violates its construction invariants."""


class UnsupportedModelError(QaepError, TypeError):
    """The operation is not defined for this source model variant."""
