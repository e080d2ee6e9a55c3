"""Exception types raised across the package."""


class KMismatchError(Exception):
    """Base class for all package errors."""


class ZeroVector(KMismatchError, ValueError):
    pass


class EmptyString(KMismatchError, ValueError):
    pass


class BadShape(KMismatchError, ValueError):
    pass


class GridFormatError(KMismatchError, ValueError):
    pass


class SizeError(KMismatchError, ValueError):
    pass


class WildcardPresent(KMismatchError, ValueError):
    pass


class RangeError(KMismatchError, IndexError):
    pass


class OffsetOutOfRange(KMismatchError, ValueError):
    pass


class TooFew(KMismatchError, ValueError):
    pass


class PreconditionViolated(KMismatchError, ValueError):
    pass


class CollinearBasis(KMismatchError, ValueError):
    pass


class MissingSignature(KMismatchError, ValueError):
    pass


class TruncatedInput(KMismatchError, ValueError):
    pass


class MixedClasses(KMismatchError, ValueError):
    pass


class OverlapError(KMismatchError, ValueError):
    pass


class NotPeripheral(KMismatchError, ValueError):
    pass
