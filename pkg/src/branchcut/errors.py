"""Exception hierarchy.  Each error carries an optional payload for reports."""
from __future__ import annotations


class BranchcutError(Exception):
    exit_code = 1

    def __init__(self, message: str = "", **payload):
        super().__init__(message)
        self.payload = payload


class InputError(BranchcutError):
    exit_code = 2


class NumericError(BranchcutError):
    exit_code = 3


# geometry
class TangentialIntersection(InputError):
    pass


class OverlapDetected(InputError):
    pass


class PointOnCurve(InputError):
    pass


class NotClosed(InputError):
    pass


class NotAdmissible(InputError):
    pass


# continuation
class NearDiscriminant(InputError):
    pass


class LeadingCoefficientVanishes(InputError):
    pass


class PathTooClose(NumericError):
    pass


class TrackingAmbiguity(NumericError):
    pass


class FitResidualTooLarge(NumericError):
    pass


class CriticalPointOnPath(InputError):
    pass


# integrals
class QuadratureNotConverged(NumericError):
    pass


class PoleOnCurve(InputError):
    pass


class ModelMismatch(NumericError):
    pass


# exact arithmetic
class UnsupportedEndpointField(InputError):
    pass


class EndpointImagesDiffer(InputError):
    pass


class ExactUnavailable(BranchcutError):
    pass


class SchemaError(InputError):
    pass
