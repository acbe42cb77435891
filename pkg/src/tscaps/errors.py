"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class CoincidentCircles(GeometryError):
    pass


class FewerThanTwoCircles(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class DegeneratePoints(GeometryError):
    pass


class InvalidPolygon(GeometryError):
    pass


class InvalidSides(GeometryError):
    pass


class OutOfDomain(GeometryError):
    pass


class OverlappingCaps(GeometryError):
    pass


class NoCommonHemisphere(GeometryError):
    pass


class UnknownName(KeyError):
    pass


class BadParams(GeometryError):
    pass


class DegeneratePointSystem(GeometryError):
    pass


class BridgeCrossing(RuntimeError):
    """Bridges of a Molnar decomposition cross; indicates numerical trouble."""


class ClassificationFailure(RuntimeError):
    pass


class MixedRadii(GeometryError):
    pass


class Infeasible(GeometryError):
    pass


class TooManyCaps(GeometryError):
    pass


class CannotSaturate(RuntimeError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class DegenerateArrangement(GeometryError):
    pass


class TooLarge(GeometryError):
    pass


class CellNotInHemisphere(GeometryError):
    pass


class ParseError(ValueError):
    """Input file could not be understood."""
