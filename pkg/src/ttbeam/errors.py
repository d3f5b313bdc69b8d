"""Exception types shared across the package."""


class RankChainError(ValueError):
    """Raised when a list of cores does not form a valid rank chain,
    or an operation's rank precondition is violated."""


class ZeroMassError(ValueError):
    """Raised when a probability table has zero total mass and therefore
    defines no distribution."""


class BudgetExceededError(RuntimeError):
    """Raised when an operation would materialize more elements than the
    configured memory budget allows."""
