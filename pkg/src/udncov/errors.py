"""Exception hierarchy shared by all modules."""


class UdnError(Exception):
    """Base class for every error raised by the package."""


class BadParameter(UdnError, ValueError):
    """A parameter is outside its admissible range."""


class PoleCollision(UdnError):
    """Ascending and descending pole sets overlap; no separating contour exists."""


class Divergent(UdnError):
    """The H-function integral does not converge at the requested argument."""


class NoConvergence(UdnError):
    """Adaptive refinement hit its cap before reaching the tolerance."""


class StripViolation(UdnError):
    """A Mellin moment was requested outside its strip of existence."""


class NotApplicable(UdnError):
    """No implemented expansion covers this parameter class."""


class TruncationOverflow(UdnError):
    """A mixture needs more terms than allowed to reach the tail-mass bound."""


class QuadratureFailure(UdnError):
    """An outer quadrature failed to reach its tolerance."""


class InvalidAssociation(UdnError):
    """The engine does not support the network's association or path loss."""


class DeltaOutOfRange(UdnError, ValueError):
    """The stability exponent 2/alpha is not inside (0, 1)."""


class ParameterSingularity(UdnError, ValueError):
    """A closed form is singular at the supplied parameters."""


class EmptyRealization(UdnError):
    """A realization has no base station to associate with."""


class ConfigError(UdnError):
    """A configuration file or override could not be parsed."""
