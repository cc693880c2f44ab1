"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DivergenceError(ArithmeticError):
    """A tail integral failed to converge (non-integrable distorted tail)."""


class UnsupportedError(RuntimeError):
    """The requested quantity is not defined for the given inputs."""


class AssumptionError(UnsupportedError):
    """The change-loss feasibility condition sup_k theta*_k <= L fails."""


class ConfigError(ValueError):
    """A scenario configuration is malformed or out of domain."""
