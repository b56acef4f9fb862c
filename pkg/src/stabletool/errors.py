"""Exception hierarchy shared by all modules."""


class StableToolError(Exception):
    """Base class for every error raised by :mod:`stabletool`."""


class GammaPoleError(StableToolError, ValueError):
    """Argument lies on (or within the guard band of) a pole of Gamma."""


class DomainError(StableToolError, ValueError):
    """A parameter is outside the domain where a formula is defined."""


class InvalidKernelError(StableToolError, ValueError):
    """The kernel violates one of the structural assumptions."""


class DegenerateKernelError(InvalidKernelError):
    """The spherical measure is (numerically) supported on a hyperplane."""


class ZeroFrequencyError(StableToolError, ValueError):
    pass


class TailDivergenceError(StableToolError, ValueError):
    """The test function grows too fast for the operator to be defined."""


class BisectionError(StableToolError, RuntimeError):
    pass


class InsufficientResolutionError(StableToolError, ValueError):
    pass


class SingularMatrixError(StableToolError, RuntimeError):
    pass


class ConfigError(StableToolError, ValueError):
    """Malformed kernel file or CLI configuration."""


class ToleranceWarning(UserWarning):
    """A quadrature did not certify the requested tolerance."""
