"""Exception hierarchy shared by every module of the package."""


class BisimError(Exception):
    """Base class for all package errors."""


# -- model loading -----------------------------------------------------------

class ModelError(BisimError):
    """Problem with a model document or a model-shaped object."""


class ParseError(ModelError):
    """The model document is not valid JSON."""


class SchemaError(ModelError):
    """A required field is missing or has the wrong JSON type."""


class ValidationError(ModelError, ValueError):
    """A value violates a model invariant.

    ``action`` and ``state`` name the offending kernel/reward entry when the
    violation is local to one (action, state) pair.
    """

    def __init__(self, message, action=None, state=None):
        super().__init__(message)
        self.action = action
        self.state = state


class IndexOutOfRange(BisimError, IndexError):
    pass


class DimensionMismatch(BisimError, ValueError):
    pass


# -- pseudometric axioms ------------------------------------------------------

class MetricError(ValidationError):
    """A state-pair matrix is not a [0,1]-valued pseudometric."""

    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class NotReflexive(MetricError):
    pass


class NotSymmetric(MetricError):
    pass


class TriangleViolation(MetricError):
    pass


# -- transport ----------------------------------------------------------------

class SolverFailure(BisimError, RuntimeError):
    """The simplex solver did not reach an optimal basis."""


class InvalidExponent(BisimError, ValueError):
    pass


# -- logic --------------------------------------------------------------------

class FormulaSyntaxError(BisimError, ValueError):
    """Malformed formula text; ``position`` is the 0-based character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownAction(BisimError, KeyError):
    def __str__(self):
        return f"unknown action {self.args[0]!r}"


class ScalarOutOfRange(BisimError, ValueError):
    pass


class LanguageError(BisimError, ValueError):
    """An L'-only operator was used where the language L was requested."""


class EmptyFormulaSet(BisimError, ValueError):
    pass


class HypothesisViolated(BisimError, ValueError):
    """The supplied witness does not separate the pair well enough."""


class MissingWitness(BisimError, KeyError):
    pass
