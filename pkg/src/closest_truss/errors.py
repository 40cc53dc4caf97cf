class CTCError(Exception):
    """Base class for all errors raised by this package."""


class EdgeListParseError(CTCError, ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class DisconnectedGraphError(CTCError, ValueError):
    pass


class NoCommunityError(CTCError):
    """Raised when no connected k-truss (k >= 2) contains every query node."""


class IndexFormatError(CTCError, ValueError):
    pass


class IndexMismatchError(CTCError):
    pass


class OracleSizeError(CTCError, ValueError):
    pass


class WorkloadInfeasibleError(CTCError):
    pass
