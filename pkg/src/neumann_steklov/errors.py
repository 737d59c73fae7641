"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class DimensionMismatchError(ValueError):
    pass


class UnsupportedMapError(ValueError):
    """The requested operation is not available for this transfer map."""


class TraceUndefinedError(ValueError):
    pass


class MeshBudgetError(ValueError):
    """Requested grading would exceed the vertex budget."""


class SolverError(RuntimeError):
    """An eigen- or minimization solve failed to converge."""
