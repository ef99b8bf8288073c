"""Exception types shared across the package."""


class CharblowError(Exception):
    """Base class for all package errors."""


class DomainError(CharblowError):
    """An evaluation point left the validity domain of a model or chart."""


class HyperbolicityError(CharblowError):
    """A sign condition required for hyperbolicity / genuine nonlinearity failed."""


class ModelError(CharblowError):
    """A pressure law or profile is ill-posed as specified."""


class GridError(CharblowError):
    """A grid or stored history is too small for the requested operation."""


class NumericalError(CharblowError):
    """A numerical method produced non-finite values."""


class DomainExitError(CharblowError):
    """The PDE solution left the validity domain during time stepping."""

    def __init__(self, message, node=None, t=None):
        super().__init__(message)
        self.node = node
        self.t = t


class IntegrationError(CharblowError):
    """An ODE integration failed before reaching its tolerance."""


class NotApplicableError(CharblowError):
    """A theorem hypothesis is not met, so the requested bound does not apply."""


class ConfigError(CharblowError):
    """Configuration text failed to parse or validate.

    Carries the full list of issues, not just the first one.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(str(i) for i in self.issues)
        super().__init__(f"{len(self.issues)} config error(s): {lines}")
