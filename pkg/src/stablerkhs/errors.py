"""Exception types shared across the package."""


class BudgetError(ValueError):
    """A request would exceed an enumeration or materialization cap."""

    def __init__(self, message: str, cap: int | None = None):
        super().__init__(message)
        self.cap = cap


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. asymmetry)."""


class ConsistencyError(RuntimeError):
    """Two independent evaluation paths disagreed."""
