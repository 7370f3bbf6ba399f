"""Errors raised by the numerical services.

Divergent integrals, missing radial limits and undecided spectrum
verdicts are reported as values, not through these exceptions.
"""


class DbrLabError(Exception):
    """Base class for every service error"""


class ConfigError(DbrLabError):
    """A scenario or object spec failed validation.

    ``field`` holds the dotted path of the offending field when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        self.reason = message
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class AtomEvaluation(DbrLabError):
    """A singular inner factor was evaluated exactly at one of its atoms"""


class TooCloseToBoundary(DbrLabError):
    """The point lies beyond the radius the quadrature can resolve"""


class QuadratureDiverged(DbrLabError):
    """Refinement failed to stabilize"""


class BoundaryValueMissing(DbrLabError):
    """A boundary kernel needs a unimodular radial limit that does not exist"""


class UnsupportedRepresentation(DbrLabError):
    """The structural form does not determine the requested quantity"""


class SingularResolvent(DbrLabError):
    """I - zeta X is numerically singular"""


class SeparationViolated(DbrLabError):
    """The measure's support meets the boundary spectrum"""
