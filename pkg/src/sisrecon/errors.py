"""Exception hierarchy shared by all modules."""


class SISReconError(Exception):
    """Base class for every error raised by :mod:`sisrecon`."""


class NotConnected(SISReconError):
    pass


class IndexOutOfRange(SISReconError, IndexError):
    pass


class LengthMismatch(SISReconError, ValueError):
    pass


class InfeasibleParams(SISReconError, ValueError):
    """A transition probability would leave [0, 1] or a log argument is non-positive."""


class TooLarge(SISReconError):
    """A brute-force search exceeds its configured size limit."""


class AllOptimal(SISReconError):
    pass


class BadIndices(SISReconError, ValueError):
    pass


class Unreachable(SISReconError):
    """No infection source is available to drive a connector."""


class NotQuadratic(SISReconError):
    pass


class FixedPointDiverged(SISReconError):
    pass


class Degenerate(SISReconError):
    """Every candidate has zero likelihood."""
