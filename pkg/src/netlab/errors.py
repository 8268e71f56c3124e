"""Exception types shared across the package."""


class NetlabError(Exception):
    """Base class for all package errors."""


class InputError(NetlabError):
    """Invalid argument, node id out of range, or malformed input file."""


class SizeLimitError(InputError):
    """Input exceeds the size an exact/exhaustive routine is willing to handle."""


class UndefinedMetricError(NetlabError):
    """The requested quantity is undefined for this input (e.g. empty graph)."""


class InsufficientDataError(NetlabError):
    """Not enough samples, or a degenerate sample, for a statistical estimate."""


class ParseError(InputError):
    """Malformed line in an input file; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
