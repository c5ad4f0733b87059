"""Exception hierarchy shared by all mbdgame modules."""


class MBDError(Exception):
    """Base class for every error raised by mbdgame."""


class InvalidArgument(MBDError, ValueError):
    pass


class CapacityExceeded(MBDError):
    pass


class NoSuchEdge(MBDError, KeyError):
    pass


class ParseError(MBDError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IllegalMove(MBDError, ValueError):
    pass


class DecidedPosition(MBDError):
    pass


class ResourceLimit(MBDError):
    """Raised when a node, table or wall-clock budget runs out.

    ``partial`` holds whatever bounds were established before the budget ran
    out, e.g. ``{"gmb": (4, inf)}``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = dict(partial or {})


class NotAWinner(MBDError):
    pass


class IncompleteCertificate(MBDError):
    pass


class InvalidCertificate(MBDError, ValueError):
    pass


class NoCover(MBDError):
    pass


class OutOfDomain(MBDError, ValueError):
    pass
