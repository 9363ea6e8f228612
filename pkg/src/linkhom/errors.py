"""Exception types shared across the package."""


class LinkhomError(Exception):
    """Base class for all package errors."""


class DiagramError(LinkhomError):
    """Base class for diagram input/validation errors."""


class MalformedToken(DiagramError):
    pass


class ArcUsedNotTwice(DiagramError):
    pass


class NonPlanarRotationSystem(DiagramError):
    pass


class SignsRequired(DiagramError):
    """Crossing signs are needed but not derivable from the PD code alone."""


class InconsistentSigns(DiagramError):
    """Explicit signs cannot be realized by any orientation choice."""


class UnknownFace(DiagramError):
    pass


class DisconnectedDiagram(DiagramError):
    pass


class NotASuccessor(LinkhomError):
    pass


class NotComparable(LinkhomError):
    pass


class UnclassifiedConfiguration(LinkhomError):
    pass


class DecorationsDifferElsewhere(LinkhomError):
    pass


class DimensionMismatch(LinkhomError):
    pass


class NotAComplex(LinkhomError):
    """d^2 != 0; carries a witness generator index."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoDomainError(LinkhomError):
    pass


class UnsupportedForBouquet(LinkhomError):
    pass


class BasepointsRequired(LinkhomError):
    pass
