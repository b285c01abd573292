"""Exception types; the CLI maps these onto exit codes."""


class PoppingError(Exception):
    """Base class for all package errors."""


class InvalidGraphError(PoppingError, ValueError):
    """Malformed graph input (self-loop, parallel edge, bad probability...)."""


class InfeasibleInstanceError(PoppingError, ValueError):
    """No perfect assignment exists (disconnected, not root-connected,
    tree component present)."""


class DrawBudgetExceeded(PoppingError, RuntimeError):
    """The configured draw cap was hit before the run terminated."""

    def __init__(self, max_draws):
        super().__init__(f"run exceeded the draw budget of {max_draws}")
        self.max_draws = max_draws


class ExtremalityViolation(PoppingError, AssertionError):
    """Two occurring bad events shared a variable; the instance encoding
    is broken."""


class PopVerificationError(PoppingError, AssertionError):
    """A popped vertex set failed the independent minimal-cluster check."""
