"""Exception hierarchy.

All errors derive from :class:`NormeshError`; the parameter-type ones also
derive from :class:`ValueError` so callers can catch them generically.
"""


class NormeshError(Exception):
    """Base class for every error raised by the package."""


class InvalidIntervalError(NormeshError, ValueError):
    pass


class InvalidAngleError(NormeshError, ValueError):
    pass


class InvalidFactorError(NormeshError, ValueError):
    pass


class ParameterError(NormeshError, ValueError):
    """A section parameter violates one of its constraints."""


class UnsupportedKindError(NormeshError, ValueError):
    pass


class DomainError(NormeshError, ValueError):
    """Coordinates fall outside the parameter box of a section."""


class ScalingError(NormeshError, ValueError):
    """A point lies outside the bounding box of a polynomial basis."""


class DeterminingSetError(NormeshError):
    """The point set does not determine the polynomial space.

    Raised when a polynomial of the space vanishes on the mesh but not on
    the domain, which signals a construction bug.
    """


class ExtractionError(NormeshError):
    pass


class NumericalError(NormeshError):
    pass
