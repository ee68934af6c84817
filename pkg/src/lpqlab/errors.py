"""Exception hierarchy shared by every module of the lab."""


class LabError(ValueError):
    """Base class for all lab errors."""


class InvalidParameter(LabError):
    """A numeric parameter is outside the admissible range."""


class InvalidInput(LabError):
    """Input data is malformed (non-finite entries, wrong shapes, ...)."""


class UnsupportedModel(LabError):
    """The requested operation does not exist for this group model."""


class CapacityError(LabError):
    """The model would exceed the configured size cap."""


class UnderResolvedQuadrature(LabError):
    """The quadrature cannot integrate the retained matrix coefficients exactly."""
