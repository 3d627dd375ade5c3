"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A scenario, network, or parameter specification is invalid or infeasible."""


class IntegrationError(RuntimeError):
    """An ODE integration failed; carries the time at which it stopped."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
