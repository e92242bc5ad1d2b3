"""Exception types shared across the library."""


class ParameterError(ValueError):
    """A parameter is outside its admissible range."""


class DomainError(ValueError):
    """An input violates a mathematical precondition (e.g. nonpositive field)."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a kernel singularity."""


class AccuracyError(RuntimeError):
    """A quadrature failed to reach the requested tolerance.

    The achieved error estimate is carried in ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConvergenceError(RuntimeError):
    """An iterative solve hit its iteration cap.

    ``last_iterate`` holds the best iterate reached, ``iterations`` the count.
    """

    def __init__(self, message, last_iterate=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class MatchingError(RuntimeError):
    """Necksize matching failed (target outside the reachable branch range)."""


class TrajectoryExitError(RuntimeError):
    """An ODE trajectory left the positive half-plane; carries the exit time."""

    def __init__(self, message, exit_time=None):
        super().__init__(message)
        self.exit_time = exit_time
