"""Exception types raised by photodamp."""


class PhotodampError(Exception):
    """Base class for all library errors."""


class TruncationError(PhotodampError):
    """The Fock cutoff is too small for the requested state."""

    def __init__(self, message, tail_mass=None):
        super().__init__(message)
        self.tail_mass = tail_mass


class ValidationError(PhotodampError):
    """An operator failed one of the density-matrix checks.

    ``kind`` is one of ``"hermiticity"``, ``"trace"``, ``"positivity"``
    (or ``"distribution"`` for a count vector with negative dips) and
    ``defect`` is the measured violation.
    """

    def __init__(self, kind, defect, message=None):
        self.kind = kind
        self.defect = float(defect)
        super().__init__(message or f"{kind} check failed (defect={self.defect:.3e})")


class ConvergenceError(PhotodampError):
    """The matrix exponential did not reach its tolerance."""
