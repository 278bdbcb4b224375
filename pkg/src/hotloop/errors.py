"""Exception types raised across the package."""


class HotloopError(Exception):
    """Base class for all package errors."""


class IncompatibleFluid(HotloopError):
    pass


class OutOfRange(HotloopError, ValueError):
    pass


class StabilityViolation(HotloopError):
    pass


class IndexOutOfRange(HotloopError, IndexError):
    pass


class NoConvergence(HotloopError):
    pass


class ZeroFlow(HotloopError):
    pass


class InvalidConfig(HotloopError, ValueError):
    """Configuration failed validation.

    ``path`` names the offending field as a dotted path (``chiller.standby_temp``).
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(InvalidConfig):
    pass


class ValidationError(InvalidConfig):
    pass


class VersionError(InvalidConfig):
    pass


class SchemaMismatch(HotloopError):
    pass


class TooFewSamples(HotloopError, ValueError):
    pass
