"""Exception hierarchy shared by all polarforge modules."""


class PolarForgeError(Exception):
    pass


class FieldError(PolarForgeError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


class WrongCharacteristic(FieldError):
    pass


class GeometryError(PolarForgeError):
    pass


class DimensionMismatch(GeometryError, ValueError):
    pass


class IncompatibleDimension(GeometryError, ValueError):
    pass


class DegenerateForm(GeometryError):
    pass


class NotSingular(GeometryError):
    pass


class TooLarge(PolarForgeError):
    pass


class CountMismatch(PolarForgeError):
    """A build-time self-check against a closed formula failed."""


class IsometryError(PolarForgeError):
    pass


class NotDirectSum(IsometryError):
    pass


class NotSimilarity(IsometryError):
    pass


class GramMismatch(IsometryError):
    pass


class DegenerateSpan(IsometryError):
    pass


class BadConfiguration(IsometryError):
    pass


class OvoidError(PolarForgeError):
    pass


class PatternViolation(OvoidError):
    pass


class NotDisjoint(OvoidError):
    pass


class SearchExhausted(OvoidError):
    """The search space was fully explored without a solution."""


class BudgetExhausted(OvoidError):
    """The node budget ran out before the search finished."""


class KleinError(PolarForgeError):
    pass


class DependentVectors(KleinError, ValueError):
    pass


class SamePoint(KleinError, ValueError):
    pass


class NotAnOvoid(KleinError):
    pass


class BadResidue(KleinError):
    pass


class SquareAlpha(KleinError):
    pass


class PipelineError(PolarForgeError):
    pass


class SearchFailed(PipelineError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConfigurationFailed(PipelineError):
    pass


class DisjointnessFailure(PipelineError):
    pass
