"""Exception hierarchy shared by all dwork modules."""


class DworkError(Exception):
    """Base class for every error raised by the package."""


class PoleError(DworkError):
    """Gamma evaluated at a non-positive integer."""


class PrecisionError(DworkError):
    """Requested working precision is below the supported floor."""


class DimensionError(DworkError):
    """Exponent vector has the wrong length or negative entries."""


class NotCanonicalForm(DworkError):
    """Operator is not in the b-variable form expected by the caller."""


class VerificationFailed(DworkError):
    """An identity that should hold exactly or to tolerance did not."""


class OrderError(DworkError):
    """Operator order unsupported by the requested construction."""


class IrregularPoint(DworkError):
    """Requested expansion point is not a regular singular point."""


class ConvergenceError(DworkError):
    """Series evaluated outside its disk of convergence (with margin)."""


class ParameterPole(DworkError):
    """A lower hypergeometric parameter hits a non-positive integer."""


class StepTooClose(DworkError):
    """A continuation step violates the safety margin to a singularity."""


class PrecisionExhausted(DworkError):
    """Tail bounds did not fall below the tolerance budget."""


class ReducibleParameters(DworkError):
    """Upper and lower hypergeometric parameters agree modulo 1."""


class InadmissibleDelta(DworkError):
    """Branch index delta is excluded by the admissibility condition."""


class DomainError(DworkError):
    """Argument outside the documented domain of an operation."""


class TruncationError(DworkError):
    """Truncation order outside the supported range."""
