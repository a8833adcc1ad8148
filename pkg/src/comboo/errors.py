"""Exception types shared across the package."""


class ComboError(Exception):
    """Base class for package errors."""


class InputError(ComboError, ValueError):
    """Invalid argument: wrong shape, out of bounds, empty where not allowed."""


class ConfigError(ComboError, ValueError):
    """Invalid experiment or run configuration."""


class NumericalError(ComboError, ArithmeticError):
    """Linear algebra failed, typically an ill-conditioned kernel matrix."""


class UnsupportedError(ComboError, NotImplementedError):
    """Requested computation is outside what is implemented."""
