"""Exception hierarchy shared by the simulation modules."""


class QRadarError(Exception):
    """Base class for all errors raised by qradar."""


class DomainError(QRadarError, ValueError):
    """A physical parameter lies outside the model's domain of validity."""


class WidthOverflowError(QRadarError, OverflowError):
    """A moment of a tabulated pulse does not converge on the sampled window."""


class AliasingError(QRadarError):
    """Grid sampling is too coarse for the Fresnel quadratic phase."""


class WindowTooSmallError(QRadarError):
    """The transverse window truncates a non-negligible part of the beam."""


class InsufficientDetectionsError(QRadarError):
    """Too few detected trials to form a range estimate."""


class ConfigError(QRadarError):
    """Invalid run configuration. ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


class PowerLeakWarning(UserWarning):
    """A propagated field carries noticeable power near the window border."""
