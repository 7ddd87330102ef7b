"""Exception hierarchy.

Domain errors (the input is well formed but the mathematics refuses it) map to
CLI exit code 1; usage errors (malformed documents, shape mismatches) map to 2.
"""


class IIFError(Exception):
    """Base class for every error raised by this package."""


class DomainError(IIFError):
    pass


class UsageError(IIFError, ValueError):
    pass


class ParseError(UsageError):
    def __init__(self, message, *, line=None, field=None):
        self.line = line
        self.field = field
        ctx = []
        if field is not None:
            ctx.append(f"field {field!r}")
        if line is not None:
            ctx.append(f"line {line}")
        if ctx:
            message = f"{message} ({', '.join(ctx)})"
        super().__init__(message)


class DimensionMismatch(UsageError):
    pass


class ZeroScalar(DomainError):
    pass


class SingularMatrix(DomainError):
    pass


class SingularTransform(SingularMatrix):
    pass


class SingularForm(DomainError):
    pass


class NotApplicable(DomainError):
    pass


class KindMismatch(DomainError):
    """The operator is not of the requested kind with respect to the form."""


class NotDiagonalizable(DomainError):
    pass


class BlockLeakage(DomainError):
    pass


class SpectrumOutsideField(DomainError):
    pass


class IllConditioned(DomainError):
    pass


class NotSelfadjoint(DomainError):
    pass


class NotEigenvalue(DomainError):
    pass


class PairingMismatch(DomainError):
    pass


class ParameterOutOfDomain(DomainError):
    pass


class HypothesisViolation(DomainError):
    pass


class NotConstructible(DomainError):
    pass


class BadFunctionalParameter(DomainError):
    pass


class NotFrobeniusBlock(DomainError):
    """The characteristic polynomial cannot be a power of an irreducible one."""
