"""Exception hierarchy shared by every module."""


class CurrentKitError(Exception):
    """Base class for all library errors."""


class ValidationError(CurrentKitError, ValueError):
    """Invalid input (bad word, bad current, bad configuration)."""


class DegeneratePoints(ValidationError):
    pass


class SharedEndpoint(CurrentKitError):
    """Two geodesics share an endpoint, so they are not transverse."""


class OverlappingIntervals(ValidationError):
    pass


class NotHyperbolic(ValidationError):
    pass


class UnknownGenerator(ValidationError):
    pass


class UnknownSurface(ValidationError):
    pass


class InvalidCurrent(ValidationError):
    pass


class ResourceLimit(CurrentKitError):
    """An enumeration would exceed the configured element cap."""


class NoCrossing(CurrentKitError):
    pass


class ValidationFailed(CurrentKitError):
    """An internal postcondition did not hold; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoHyperbolicBranch(CurrentKitError):
    pass


class StepLimit(CurrentKitError):
    pass


class NonInvertible(ValidationError):
    pass


class SpectrumPairingFailed(CurrentKitError):
    pass


class DegenerateFamily(ValidationError):
    pass
