"""Exception hierarchy shared across the package."""


class DiophlabError(Exception):
    """Base class for all package errors."""


class MalformedSpec(DiophlabError):
    """A theta component spec is syntactically or semantically invalid
    (zero denominator, non-isolating interval, bad schedule, ...)."""


class PrecisionExhausted(DiophlabError):
    """A certified decision could not be made at the maximum allowed
    precision.  Carries enough context to identify the offending value."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class BudgetExceeded(DiophlabError):
    """An exhaustive enumeration would exceed the configured candidate cap."""


class TooFewRecords(DiophlabError):
    """Exponent estimation needs at least 4 records."""


class RationalDependence(DiophlabError):
    """Enumeration hit an exact integer relation (err = 0): the exponents
    are degenerate and downstream checks must know.  Carries the relation
    vector and the records found before the hit."""

    def __init__(self, relation, records):
        super().__init__(f"exact rational relation hit: {relation}")
        self.relation = relation
        self.records = records


class DependentInput(DiophlabError):
    """Spanning vectors passed to saturation are linearly dependent."""


class WrongDimension(DiophlabError):
    """Subspace dimension does not match what the operation requires."""


class DegenerateDenominator(DiophlabError):
    """An exponent value makes a required denominator vanish (lambda_hat = 1
    or omega_hat <= 1)."""


class DegenerateT(DiophlabError):
    """The cylinder scale t is certified within an unseparable neighborhood
    of 1, so log t cannot be used as a denominator."""


class DimensionTooLarge(DiophlabError):
    """d fails the proviso d < (1+beta)/(1+beta-alpha)."""


class ConditionFails(DiophlabError):
    """The refined-bound condition value is certified <= n-1."""


class EntryViolation(DiophlabError):
    """An evidence entry fails one of its certified bounds."""

    def __init__(self, k, which, message=""):
        super().__init__(message or f"evidence entry {k} violates {which}")
        self.k = k
        self.which = which


class UsageError(DiophlabError):
    """Bad command-line arguments (maps to exit code 64)."""
