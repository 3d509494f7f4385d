"""Exception hierarchy.

Every error raised by the package derives from :class:`PolysmoothError`, so
callers can catch the whole family at once.  The class name doubles as the
machine-readable violation code in reports.
"""


class PolysmoothError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# mesh
class ParseError(PolysmoothError):
    pass


class TopologyError(PolysmoothError):
    pass


class GeometryError(PolysmoothError):
    pass


class BoundaryVertex(PolysmoothError):
    pass


class NonManifoldStar(TopologyError):
    pass


# sphere
class NotSimple(PolysmoothError):
    pass


class DegenerateAngle(GeometryError):
    pass


class PointOnBoundary(PolysmoothError):
    pass


class NotHemispherical(PolysmoothError):
    pass


# curvature
class AntipodalNormals(GeometryError):
    pass


class StraightAngle(GeometryError):
    pass


class NonGenericDirection(PolysmoothError):
    pass


class ZeroCurvature(PolysmoothError):
    pass


class ClassificationMismatch(PolysmoothError):
    pass


# indicatrix
class PlaneThroughApex(PolysmoothError):
    pass


class WrongCurvatureSign(PolysmoothError):
    pass


class EmptyKernel(PolysmoothError):
    pass


# faces
class BoundaryFace(PolysmoothError):
    pass


class MixedSigns(PolysmoothError):
    pass


class AngleSumNot2Pi(PolysmoothError):
    pass


class TooManySignChanges(PolysmoothError):
    pass


class UnbalancedAngleSum(PolysmoothError):
    pass


class PartialSumTooLarge(PolysmoothError):
    pass


class HullViolation(PolysmoothError):
    pass


class NoInteriorSegment(PolysmoothError):
    pass


class NotDecomposable(PolysmoothError):
    pass


class WrongSign(PolysmoothError):
    pass


# projective
class PointAtInfinity(PolysmoothError):
    pass


class DegenerateImage(GeometryError):
    pass


class NoHemisphere(PolysmoothError):
    pass


class NoAdmissibleCenter(PolysmoothError):
    pass


class CenterOnFacePlane(PolysmoothError):
    pass


class EmptyInterior(PolysmoothError):
    pass


class CorrespondenceMismatch(PolysmoothError):
    pass


# fixtures
class BadParameters(PolysmoothError):
    pass
