"""Exception hierarchy shared by all modules."""


class CCFError(Exception):
    """Base class for every error raised by ccfbessel."""


class DomainError(CCFError, ValueError):
    """Argument outside the domain of a function."""


class PoleError(DomainError):
    """Argument sits on (or within 1e-8 of) a pole of a gamma factor."""


class ConvergenceError(CCFError, ArithmeticError):
    """An iterative procedure ran out of budget before meeting its tolerance."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class BranchFailure(ConvergenceError):
    """Neither evaluation branch of a special function met its tolerance."""


class InconsistencyError(CCFError, ArithmeticError):
    """Two independent representations of the same quantity disagree."""


class RegimeError(CCFError, ValueError):
    """A moment solver was asked to run outside its admissible regime."""


class InstabilityError(CCFError, ArithmeticError):
    """A recurrence produced values failing its sanity checks."""


class SingularSystemError(CCFError, ArithmeticError):
    """A linear solve failed or was numerically singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class SamplingError(CCFError, ValueError):
    """Sample arrays do not match the expected node layout."""
