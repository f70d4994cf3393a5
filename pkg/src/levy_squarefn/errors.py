"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model, grid or quadrature parameters."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation (e.g. y = 0)."""


class UnsupportedOperationError(RuntimeError):
    """Operation has no closed form / implementation for this model kind."""


class StructuralError(ValueError):
    """Mismatched array sizes or incompatible grids."""


class ResolutionError(RuntimeError):
    """Grid cannot resolve the requested quantity (aliasing would corrupt it)."""


class CostGuardError(RuntimeError):
    """Requested computation exceeds the configured cost budget."""


class ConfigError(ValueError):
    """Invalid run configuration."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
