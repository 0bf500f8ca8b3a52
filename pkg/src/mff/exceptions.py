"""Exception hierarchy shared by every module of the package."""


class MFFError(Exception):
    """Base class for all errors raised by :mod:`mff`."""


class ConfigError(MFFError, ValueError):
    """Invalid parameters, schedules or run configuration."""


class DomainError(MFFError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DegeneracyError(DomainError):
    """The requested quantity is not determined because weights are uniform."""


class BoundaryError(MFFError, LookupError):
    """A neighbour was requested past the edge of the unit interval."""


class UnsupportedCodeError(MFFError, ValueError):
    """An isometry code was applied to an alphabet it does not support."""


class ResourceError(MFFError, RuntimeError):
    """An exhaustive computation would exceed its enumeration budget."""
