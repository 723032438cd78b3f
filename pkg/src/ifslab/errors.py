"""Exception hierarchy shared by all modules."""


class IFSLabError(Exception):
    """Base class for library errors."""


class DimensionError(IFSLabError, ValueError):
    """Operands live in incompatible ambient dimensions or have the wrong shape."""


class DomainError(IFSLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateMapError(DomainError):
    """A similarity with zero scaling ratio was requested."""


class NotSimilitudeError(DomainError):
    """A product of maps with unequal ratios is not a similarity."""


class UnsupportedError(IFSLabError, NotImplementedError):
    """The operation is not available for this input (e.g. ambient dimension >= 3)."""


class ConvergenceError(IFSLabError, RuntimeError):
    """An iterative procedure did not converge within its iteration cap."""


class BudgetError(IFSLabError, RuntimeError):
    """A combinatorial enumeration would exceed the configured budget.

    ``largest_feasible`` carries the largest parameter value (word length,
    level, ...) that still fits, and ``partial`` any result computed before
    the budget was hit.
    """

    def __init__(self, message, largest_feasible=None, partial=None):
        super().__init__(message)
        self.largest_feasible = largest_feasible
        self.partial = partial
