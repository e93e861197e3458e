"""Exception types shared across the package."""


class DendriticError(Exception):
    """Base class for all package errors."""


class DimensionError(DendriticError, ValueError):
    """Operands have incompatible shapes or lengths."""


class DomainError(DendriticError, ValueError):
    """A value is outside the domain an operation is defined on."""


class ConfigError(DendriticError, ValueError):
    """An experiment configuration is invalid or inconsistent."""


class InputError(DendriticError, ValueError):
    """A dataset file failed to parse.

    ``line`` carries the 1-based line (or record) number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
