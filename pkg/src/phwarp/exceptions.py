"""Exception types raised by phwarp.

Every error derives from :class:`PhwarpError`, itself a ``ValueError``, so
callers that only care about "bad input" can catch the builtin.
"""


class PhwarpError(ValueError):
    """Base class for all phwarp errors."""

    kind = "error"


class DegenerateRangeError(PhwarpError):
    kind = "degenerate-range"


class OutOfRangeError(PhwarpError):
    kind = "out-of-range"


class DomainError(PhwarpError):
    kind = "domain"


class NotFinitizedError(PhwarpError):
    kind = "not-finitized"


class EmptyInputError(PhwarpError):
    kind = "empty-input"


class InvalidPairError(PhwarpError):
    kind = "invalid-pair"


class InvalidEpsilonError(PhwarpError):
    kind = "invalid-epsilon"


class InvalidArgumentError(PhwarpError):
    kind = "invalid-argument"


class InvalidCountError(PhwarpError):
    kind = "invalid-count"


class DimensionError(PhwarpError):
    kind = "dimension"


class SizeError(PhwarpError):
    kind = "size"


class ConfigurationError(PhwarpError):
    kind = "configuration"


class InvalidWeightsError(PhwarpError):
    kind = "invalid-weights"


class MissingLabelsError(PhwarpError):
    kind = "missing-labels"


class UndefinedMetricError(PhwarpError):
    kind = "undefined-metric"


class ParseError(PhwarpError):
    """Malformed input file; carries the offending path and line number."""

    kind = "parse"

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
