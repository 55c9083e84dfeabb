"""Exception types shared across the package."""


class DoubleSieveError(Exception):
    """Base class for all package errors."""


class DomainTooSmallError(DoubleSieveError):
    """Requested table does not cover the needed range."""


class InvalidToleranceError(DoubleSieveError):
    pass


class InvalidStepError(DoubleSieveError):
    pass


class OutOfDomainError(DoubleSieveError):
    """Evaluation outside the tabulated range; extrapolation is never performed."""


class QuadratureFailure(DoubleSieveError):
    """Adaptive quadrature did not converge; carries the best estimate."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class InvalidDomainError(DoubleSieveError):
    pass


class UnknownTermError(DoubleSieveError):
    pass


class InvalidParamsError(DoubleSieveError):
    pass


class NoFeasiblePointError(DoubleSieveError):
    pass


class SingularSystemError(DoubleSieveError):
    pass


class ResourceLimitError(DoubleSieveError):
    pass


class InvalidInputError(DoubleSieveError):
    pass


class ConfigError(DoubleSieveError):
    pass
