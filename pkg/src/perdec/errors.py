"""Exception taxonomy shared by all perdec modules."""


class PerdecError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PerdecError):
    """Operands live in grids of different dimension."""


class OutOfDomainError(PerdecError):
    """A value was requested outside a window's box."""


class EmptyRegionError(PerdecError):
    """An eroded window or a domain intersection came out empty."""


class LatticeError(PerdecError):
    """Singular basis, dependent generators, or a point outside a span."""


class SchemaError(PerdecError):
    """A JSON document violates the on-disk schema or a type invariant."""


class PreconditionError(PerdecError):
    """An operation was called with inputs that fail its stated preconditions."""


class VerificationError(PerdecError):
    """A constructed object failed one of its defining identities."""


class InconclusiveError(PerdecError):
    """A bounded search was exhausted without a verdict (not a refutation)."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound
