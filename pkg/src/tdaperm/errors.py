"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented invariant (bad diagram, grid, labels, ...)."""


class ParseError(ValidationError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceCapError(RuntimeError):
    """A construction would exceed a configured resource cap."""
