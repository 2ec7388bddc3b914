"""Exception hierarchy shared by all modules."""


class DualCertError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(DualCertError, ValueError):
    """Malformed input: wrong shapes, nonpositive sizes, bad layouts."""


class DomainError(DualCertError, ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class StructuralError(DualCertError):
    """The problem instance cannot support the requested construction,
    e.g. fewer measurements than the dimension of the model subspace."""


class IllConditionedError(StructuralError):
    """The map restricted to the model subspace is numerically singular."""

    def __init__(self, message, sigma_min=None, sigma_max=None):
        super().__init__(message)
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max
