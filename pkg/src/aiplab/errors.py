"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by :mod:`aiplab`."""


class GeometryError(LabError):
    pass


class DegenerateInput(GeometryError):
    """Input points do not span the ambient space."""


class UnsupportedDimension(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class EmptyClip(GeometryError):
    """A clip left no full-dimensional piece."""


class CenterOutside(GeometryError):
    """A center point is not in the interior of the body."""


class Unbounded(GeometryError):
    pass


class EmptyPolytope(GeometryError):
    pass


class SingularMap(GeometryError):
    pass


class BodyFormatError(LabError):
    """A body file failed validation; ``where`` names the line or field."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class NoConvergence(LabError):
    pass


class EmptyFloatingBody(LabError):
    pass


class DegenerateDifference(LabError):
    pass


class InadmissibleParameters(LabError):
    pass


class ZeroDirection(LabError):
    pass


class EtaTooLarge(LabError):
    pass


class ConstructionFailed(LabError):
    def __init__(self, message, stage=None):
        self.stage = stage
        self.detail = message
        self.log = []
        super().__init__(message if stage is None else f"stage {stage}: {message}")


class SearchExhausted(LabError):
    def __init__(self, message, best_gap=None, frontier=None):
        self.best_gap = best_gap
        self.frontier = frontier or []
        super().__init__(message)
