"""Exception hierarchy.

:class:`DomainError` covers every violated precondition on the initial data
or parameters; the CLI maps it to exit code 1.
"""


class DomainError(ValueError):
    """Input lies outside the domain where the operation is defined."""


class SingularPosition(DomainError):
    """cos x = 0: the coefficient of the second derivative is singular."""


class ForbiddenVelocity(DomainError):
    """Initial velocity b = 1: the coefficient of the second derivative is unbounded."""


class SingularVelocity(DomainError):
    """Velocity v = 1 in a quotient form that is 0/0 or unbounded there."""


class NotApplicable(DomainError):
    """Operation does not apply to this orbit class."""


class InvalidXi(DomainError):
    """Special-family parameter xi is one of 0, 1, -1."""


class InvalidLevel(DomainError):
    """Energy level outside the range an operation accepts."""


class OutOfRange(DomainError):
    """Target value outside the range of an inverse branch."""


class EmptyCurve(DomainError):
    """No phase-plane point lies on the requested level."""


class TooCloseToCrossing(DomainError):
    """Finite-difference stencil straddles or nears an interface crossing."""


class StepFailure(RuntimeError):
    """Adaptive step size underflowed the minimum step."""

    def __init__(self, t: float, h: float, state):
        t, h, state = float(t), float(h), tuple(float(s) for s in state)
        super().__init__(f"step size underflow at t={t!r} (h={h!r}, state={state!r})")
        self.t = t
        self.h = h
        self.state = state


class SinkError(OSError):
    """Writing to an output sink failed."""
