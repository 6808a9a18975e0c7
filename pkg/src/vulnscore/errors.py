"""Exception types shared across the package."""


class VulnscoreError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(VulnscoreError):
    """Syntactically malformed input (DOT, CVSS vector, JSON feed)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFormatError(ParseError):
    """Input is well-formed but in a format this package does not accept."""


class ValidationError(VulnscoreError):
    """Structurally valid input that violates the schema.

    ``path`` names the offending location, e.g. ``vulnerabilities[2].chains[0]``.
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class IntegrityError(VulnscoreError):
    """Cross-reference violation, e.g. a chain naming a function absent from the graph."""


class NotFoundError(VulnscoreError, KeyError):
    """A named function does not exist in the graph or report."""

    def __str__(self) -> str:  # KeyError quotes its argument; keep the plain message
        return Exception.__str__(self)


class ConfigurationError(VulnscoreError):
    """The input satisfies its schema but cannot support the requested operation."""


class ConflictError(VulnscoreError):
    """An optimistic write lost the race; ``current`` carries the value now in effect."""

    def __init__(self, message: str, current: str | None = None):
        self.current = current
        super().__init__(message)
