"""Exception hierarchy.

Everything a caller can reasonably recover from derives from
:class:`CpacError`; the CLI maps these to exit status 1.
"""


class CpacError(Exception):
    """Base class for domain errors."""


class BudgetExhausted(CpacError):
    """A step budget ran out before a totality-relevant computation halted."""


class DomainBoundTooSmall(CpacError):
    pass


class NoHypothesisFound(CpacError):
    pass


class UnknownAtCutoff(CpacError):
    """A question about an enumerated class could not be settled below the cutoff."""


class InfiniteVC(CpacError):
    pass


class EnumerationBudgetExceeded(CpacError):
    pass


class MissingSampleComplexity(CpacError):
    pass


class OracleFailure(CpacError):
    pass


class EmptySample(CpacError, ValueError):
    pass


class FormatError(CpacError, ValueError):
    """Malformed input text (program, class spec, sample, distribution, formula)."""
