"""Exception hierarchy shared by all modules."""


class GeoSubdivError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(GeoSubdivError, ValueError):
    """Input broke a documented precondition (non-unit point, bad shape, ...)."""


class AntipodalPoints(GeoSubdivError, ValueError):
    """The logarithm map is undefined because the points are (nearly) antipodal."""


class DomainError(GeoSubdivError, ValueError):
    """A scalar function was evaluated outside its admissible range."""


class PointsOutsideBall(GeoSubdivError, ValueError):
    pass


class NoConvergence(GeoSubdivError, RuntimeError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class SingularHessian(GeoSubdivError, RuntimeError):
    pass


class LeftCertifiedBall(GeoSubdivError, RuntimeError):
    pass


class UnknownScheme(GeoSubdivError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown scheme"


class LengthMismatch(GeoSubdivError, ValueError):
    pass


class GateViolation(GeoSubdivError, ValueError):
    """Input data failed a well-definedness or convergence gate.

    ``index`` is the output index (or ``None`` for sequence-level gates) and
    ``conditions`` lists the violated conditions in readable form.
    """

    def __init__(self, message, index=None, conditions=()):
        super().__init__(message)
        self.index = index
        self.conditions = list(conditions)


class DegenerateDenominator(GeoSubdivError, ArithmeticError):
    pass


class AssumptionViolated(GeoSubdivError, RuntimeError):
    def __init__(self, message, assumption=None):
        super().__init__(message)
        self.assumption = assumption


class CompositionFailure(GeoSubdivError, RuntimeError):
    pass


class DimensionUnsupported(GeoSubdivError, ValueError):
    pass
