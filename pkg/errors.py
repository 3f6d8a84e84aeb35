"""
Exception hierarchy shared by every module of the outer-space toolkit.

Library operations raise these; report-style operations (validity reports,
equivalence searches) return negative answers instead of raising.
"""


class OuterSpaceError(Exception):
    """Base class for all toolkit errors."""


class GraphValidationError(OuterSpaceError, ValueError):
    """A graph, chain or point violates a structural precondition."""


class ParameterError(OuterSpaceError, ValueError):
    """A numeric parameter (eps, radius, tolerance, ...) is out of range."""


class MarkingError(OuterSpaceError, ValueError):
    """A marking is not an integer cycle basis of the graph."""


class NotPositiveDefiniteError(OuterSpaceError, ValueError):
    """A matrix expected to be symmetric positive definite is not."""


class EnumerationOverflowError(OuterSpaceError):
    """A bounded lattice enumeration would exceed its node budget."""


class NonConvergenceError(OuterSpaceError):
    """An iterative numeric procedure did not reach its tolerance.

    Attributes:
        partial_sums: the sequence of estimates produced before giving up
    """

    def __init__(self, message, partial_sums=None):
        super().__init__(message)
        self.partial_sums = list(partial_sums or [])


class NoConnectingPathError(OuterSpaceError):
    """No piecewise-linear route between two points was found within budget."""


class InternalConsistencyError(OuterSpaceError):
    """An invariant that the theory guarantees was observed to fail."""
