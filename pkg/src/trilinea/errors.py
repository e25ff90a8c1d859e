"""Exception hierarchy shared by the kernel and the command line."""


class TrilineaError(Exception):
    """Base class for every error raised by this package."""


class ParallelLines(TrilineaError):
    """Two line directions are parallel within the numerical band."""


class DegenerateScene(TrilineaError):
    """The scene is unusable, e.g. two of the lines coincide."""


class NotPerpendicular(TrilineaError):
    pass


class EdgeTooShort(TrilineaError):
    """An edge is not longer than the gap between its two lines."""


class DegenerateTriangle(TrilineaError):
    """Edge lengths violate the strict triangle inequality."""


class NoThirdVertex(TrilineaError):
    """The rigidly carried third vertex does not land on its line."""


class AmbiguousSide(TrilineaError):
    """Both carry candidates coincide so the side cannot be chosen."""


class InvalidSampleCount(TrilineaError):
    pass


class NotPlanarizable(TrilineaError):
    """The scene has no plane in which the motion can be drawn."""


class InfeasibleMotion(TrilineaError):
    """A motion was requested for a scene that admits none."""


class InternalInconsistency(TrilineaError):
    """Two independent detectors disagree; this indicates a bug."""


class ParseError(TrilineaError):
    pass


class ValidationError(TrilineaError):
    pass
