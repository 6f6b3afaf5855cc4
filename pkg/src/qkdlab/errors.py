"""Exception types raised across the simulator."""


class QkdError(Exception):
    """Base class for all simulator errors."""


class MeasuringConsumedPhoton(QkdError):
    """A photon was measured a second time after collapsing."""


class OddLength(QkdError, ValueError):
    """A pair-granular operation received an odd number of bits."""


class LengthMismatch(QkdError, ValueError):
    """Two sequences that must align have different lengths."""


class MalformedMessage(QkdError, ValueError):
    """A classical message payload does not fit its declared kind."""


class PositionOutOfRange(QkdError, IndexError):
    """A key position does not exist in the raw transmission."""


class KeyTooShort(QkdError, ValueError):
    """Not enough key material remains for the requested post-processing."""


class InvariantViolation(QkdError):
    """The simulator detected an internal inconsistency."""


class ReplayMismatch(QkdError):
    """A replayed worked example did not reproduce its expected rows."""
