"""Exception hierarchy.

Input errors (bad documents, malformed instances) and solver precondition
errors (wrong valuation class, bad epsilon, size caps) are kept apart so the
command line can map them to distinct exit codes.
"""


class PoolPBError(Exception):
    """Base class for every error raised by this package."""


class InputError(PoolPBError, ValueError):
    """The supplied data is malformed or violates a model invariant."""


class PreconditionError(PoolPBError, ValueError):
    """A solver was called on an instance outside its supported class."""


class ArityMismatch(InputError):
    pass


class NegativeQuantity(InputError):
    pass


class NonMonotoneValuation(InputError):
    pass


class UncoverableProject(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {position})" if position is not None else ")")
        super().__init__(message + where)


class SchemaError(InputError):
    def __init__(self, field, message=None):
        self.field = field
        super().__init__(field if message is None else f"{field}: {message}")


class UnsupportedVoteType(InputError):
    pass


class NoVoters(InputError):
    pass


class NoApprovals(InputError):
    pass


class UniverseNotDivisibleBy3(InputError):
    pass


class NotLaminar(PreconditionError):
    pass


class GraphForestMismatch(InputError):
    pass


class NotWpFundable(PreconditionError):
    pass


class WrongValuationClass(PreconditionError):
    pass


class CostsNotIdentical(PreconditionError):
    pass


class BadEpsilon(PreconditionError):
    pass


class TooManyProjects(PreconditionError):
    pass


class CapacityNegative(PreconditionError):
    pass


class TableTooLarge(PreconditionError):
    pass


class OracleCapExceeded(PreconditionError):
    pass
