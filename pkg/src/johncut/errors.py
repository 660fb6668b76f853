"""Exception hierarchy. Every error carries the module and step it came from."""


class JohnCutError(Exception):
    module = "johncut"

    def __init__(self, message: str = "", step: str | None = None):
        super().__init__(message)
        self.step = step

    def describe(self) -> str:
        where = self.module if self.step is None else f"{self.module}.{self.step}"
        return f"{type(self).__name__} [{where}]: {self}"


# geom_core
class GeometryError(JohnCutError):
    module = "geom_core"


class SelfIntersecting(GeometryError):
    pass


class DegenerateArea(GeometryError):
    pass


class TooFewVertices(GeometryError):
    pass


class InvalidEta(GeometryError):
    pass


class EmptyCurve(GeometryError):
    pass


class SegmentNotInPolygon(GeometryError):
    pass


# geodesic
class GeodesicError(JohnCutError):
    module = "geodesic"


class PointOutside(GeodesicError):
    pass


# partition_core
class PartitionError(JohnCutError):
    module = "partition_core"


class ChordOnBoundary(PartitionError):
    pass


class ChordExitsPolygon(PartitionError):
    pass


class ChordTouchesBoundaryInternally(PartitionError):
    pass


# semiconvex
class SemiconvexError(JohnCutError):
    module = "semiconvex"


class ChordInvalid(SemiconvexError):
    pass


class IterationLimitExceeded(SemiconvexError):
    pass


# rotund
class RotundError(JohnCutError):
    module = "rotund"


class NotConvex(RotundError):
    pass


class AngleTooSharp(RotundError):
    pass


class NotSemiconvexInput(RotundError):
    pass


# john
class JohnError(JohnCutError):
    module = "john"


class ConstructionFailed(JohnError):
    pass


class CurveExitsPolygon(JohnError):
    pass


class BallCoversDomain(JohnError):
    pass


class NotAdjacent(JohnError):
    pass


class SharedTooShort(JohnError):
    pass


# smooth_ingest
class IngestError(JohnCutError):
    module = "smooth_ingest"


class TooManyHoles(IngestError):
    pass


class SlitPlacementFailed(IngestError):
    pass


class FrameConstructionFailed(IngestError):
    pass


# cli
class CliError(JohnCutError):
    module = "cli"


class UnknownKind(CliError):
    pass


class MalformedInput(CliError):
    pass
