"""Exception hierarchy for rmspace."""


class RMSpaceError(Exception):
    """Base class for every error raised by this package."""


class InvalidEventError(RMSpaceError, ValueError):
    pass


class PartitionError(RMSpaceError, ValueError):
    pass


class SpaceMismatchError(RMSpaceError, ValueError):
    """Operands live on different probability spaces or base spaces."""


class ExtendedArithmeticError(RMSpaceError, ArithmeticError):
    """Raised for the undefined sum (+inf) + (-inf)."""


class EmptySetError(RMSpaceError, ValueError):
    pass


class UnboundedError(RMSpaceError, ValueError):
    pass


class NotSigmaStableError(RMSpaceError):
    """A set, map or function failed to commute with (or be closed under) gluing."""


class HullCapError(RMSpaceError):
    """Materializing a sigma-stable hull would exceed the configured size cap."""

    def __init__(self, size, cap):
        super().__init__(
            f"sigma-stable hull would hold up to {size} points, above the cap of {cap}; "
            "the hull grows combinatorially in the number of atoms"
        )
        self.size = size
        self.cap = cap


class NotInSetError(RMSpaceError, ValueError):
    pass


class ContractionViolation(RMSpaceError):
    """A contraction hypothesis failed on a spot-checked pair."""

    def __init__(self, message, atom=None, lhs=None, rhs=None):
        super().__init__(message)
        self.atom = atom
        self.lhs = lhs
        self.rhs = rhs


class ConvergenceError(RMSpaceError):
    """An iterative solver hit max_iter before meeting its stopping rule."""

    def __init__(self, message, last=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.iterations = iterations


class HypothesisError(RMSpaceError, ValueError):
    """A solver precondition (Caristi inequality, near-minimality of x0, ...) fails."""


class OracleFailure(RMSpaceError):
    pass
