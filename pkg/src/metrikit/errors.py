"""Exception hierarchy. Every error carries a machine-readable ``kind``."""


class MetrikitError(Exception):
    kind = "error"


class StructuralError(MetrikitError, ValueError):
    """Malformed input: wrong shapes, bad indices, non-bijections."""

    kind = "structural"


class InvalidDataError(MetrikitError, ValueError):
    kind = "invalid-data"


class DomainError(MetrikitError, ValueError):
    """A numeric parameter is outside the operation's domain."""

    kind = "domain"


class PreconditionError(MetrikitError, ValueError):
    kind = "precondition"

    def __init__(self, message, condition="precondition"):
        super().__init__(message)
        self.condition = condition


class DegenerateInputError(MetrikitError, ValueError):
    kind = "degenerate-input"


class ResolutionError(MetrikitError, ValueError):
    """Requested scale is finer than the grid can certify."""

    kind = "resolution"


class ResourceError(MetrikitError, ValueError):
    kind = "resource"


class ParseError(MetrikitError, ValueError):
    kind = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
