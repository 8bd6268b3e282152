"""Exception types.

Geometric failures (degenerate configurations a construction cannot get
past) derive from :class:`GeometryError`; malformed input raises plain
``ValueError``.  The CLI maps the first to exit status 2 and the second to 1.
"""


class GeometryError(Exception):
    """A construction hit a degenerate or inconsistent configuration.

    ``index`` is the failing edge/sample/vertex when the error comes out of
    an iteration, ``stage`` names the stage of a multi-step construction.
    """

    def __init__(self, message="", *, index=None, stage=None, residual=None):
        super().__init__(message)
        self.index = index
        self.stage = stage
        self.residual = residual

    def __str__(self):
        msg = super().__str__()
        extra = []
        if self.stage is not None:
            extra.append(f"stage {self.stage}")
        if self.index is not None:
            extra.append(f"index {self.index}")
        if extra:
            msg = f"{msg} ({', '.join(extra)})"
        return msg

    def to_dict(self):
        out = {"error": type(self).__name__, "message": Exception.__str__(self)}
        for key in ("index", "stage", "residual"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


class PointAtInfinity(GeometryError):
    pass


class DegenerateSignature(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class NotConcircular(GeometryError):
    pass


class NotCospherical(GeometryError):
    pass


class NoIntersection(GeometryError):
    pass


class InputNotIncident(GeometryError):
    pass


class AmbiguousIdenticalCircles(GeometryError):
    pass


class CurveMeetsSphere(GeometryError):
    pass


class NetMeetsSphere(CurveMeetsSphere):
    pass


class InitialNotOnSphere(GeometryError):
    pass


class InconsistentCube(GeometryError):
    pass


class MiguelMismatch(GeometryError):
    pass


class OrderMismatch(GeometryError):
    pass


class ZeroDenominator(GeometryError):
    pass


class RankDeficient(GeometryError):
    pass


class NonParallelFrame(GeometryError):
    pass


class DegenerateDerivative(GeometryError):
    pass


class NonRibaucourInput(GeometryError):
    pass


class BoundaryMismatch(GeometryError):
    pass
