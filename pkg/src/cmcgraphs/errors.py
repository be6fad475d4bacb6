"""Exception hierarchy shared by every module of the package."""


class CMCError(Exception):
    """Base class for all errors raised by cmcgraphs."""


class InvalidInputError(CMCError, ValueError):
    """Parameters violate a hypothesis (e.g. 4H^2 + c <= 0, mismatched space forms)."""


class DomainError(CMCError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NoSolutionError(CMCError, ValueError):
    """A root-finding step found no admissible interval."""


class AccuracyError(CMCError, ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy."""


class StepSizeUnderflowError(AccuracyError):
    """Adaptive ODE integration could not make progress.

    ``t`` holds the parameter value reached when the step collapsed.
    """

    def __init__(self, message, t):
        super().__init__(message)
        self.t = t


class SingularParametrizationError(CMCError, ArithmeticError):
    """The surface chart is degenerate at the requested point (EG - F^2 ~ 0)."""
