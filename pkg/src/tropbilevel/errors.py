"""Shared exception types."""


class BudgetExceededError(Exception):
    """Raised when an enumeration would exceed its instantiation budget."""


class UnsupportedInstanceError(Exception):
    """Raised when data falls outside what a solver or encoder supports."""


class SolverInconsistencyError(Exception):
    """Raised when two routes that must agree produce different answers."""
