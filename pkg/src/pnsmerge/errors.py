"""Exception hierarchy shared by every module."""


class PnsMergeError(Exception):
    """Base class for all library errors."""


class ValidationError(PnsMergeError, ValueError):
    pass


class MalformedPayload(ValidationError):
    pass


class NegativeCount(ValidationError):
    pass


class EmptyTreatmentArm(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class DegenerateTreatmentMarginal(ValidationError):
    pass


class LambdaOutOfRange(ValidationError):
    pass


class ConditioningEventNull(PnsMergeError, ZeroDivisionError):
    """The observed event conditioned on has probability zero."""


class NotDegenerate(PnsMergeError, ValueError):
    """The Y-marginal has no degenerate conditional."""


class Incompatible(PnsMergeError):
    """No joint response-function model reproduces both marginals.

    ``violated`` lists the names of the failed conditions, when known.
    """

    def __init__(self, message="marginals are incompatible", violated=()):
        super().__init__(message)
        self.violated = tuple(violated)


class Infeasible(PnsMergeError):
    pass


class Unbounded(PnsMergeError):
    pass


class NoConvergence(PnsMergeError, RuntimeError):
    pass


class DimensionTooHigh(PnsMergeError):
    pass
