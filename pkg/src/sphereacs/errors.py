"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called with inputs outside its stated contract."""


class InvalidManifold(ValueError):
    """The manifold does not satisfy a structural precondition of the operation."""


class DegenerateInput(ValueError):
    """Numerically degenerate input, e.g. a tangent plane with vanishing area."""


class StepSizeError(ValueError):
    """Finite-difference step outside the trustworthy range."""


class SearchError(RuntimeError):
    """The minimizer could not obtain a finite objective value."""


class ConfigError(ValueError):
    """Malformed run configuration."""
