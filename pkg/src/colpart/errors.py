"""Exceptions raised across the package.

The CLI maps these onto exit codes: :class:`UsageError` and its subclasses
give 2, :class:`BudgetExceeded` gives 3.
"""


class ColpartError(Exception):
    """Base class for package errors."""


class UsageError(ColpartError, ValueError):
    """Bad arguments or configuration."""


class NotAGroup(UsageError):
    def __init__(self, message: str, witness: tuple[int, ...] | None = None):
        super().__init__(message)
        self.witness = witness


class SizeLimit(UsageError):
    """A requested object exceeds a configured size cap."""


class SizeMismatch(UsageError):
    pass


class BadIndex(UsageError):
    pass


class ContextMismatch(UsageError):
    pass


class NotAPermutationDiagram(UsageError):
    pass


class RingUnsupported(UsageError):
    pass


class ZeroIdeal(ColpartError):
    pass


class FullS(ColpartError):
    pass


class VerificationFailed(ColpartError):
    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(ColpartError):
    pass
