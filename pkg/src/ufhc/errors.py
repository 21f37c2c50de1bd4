"""Exception types shared across the pipeline."""


class NonSummable(ValueError):
    """An inverse-product series has no convergent majorant."""


class UncertifiedTail(NonSummable):
    """The series may converge, but no analytic majorant is available for it."""


class NotApplicable(RuntimeError):
    """The criterion's hypotheses are not all verified for the requested family."""

    def __init__(self, message, verdicts=()):
        super().__init__(message)
        self.verdicts = list(verdicts)


class BudgetExceeded(RuntimeError):
    def __init__(self, message, tau=None, l_tau=None, cap=None):
        super().__init__(message)
        self.tau = tau
        self.l_tau = l_tau
        self.cap = cap


class ConstructionError(RuntimeError):
    """A postcondition of the block construction failed (a bug, not bad input)."""


class ConfigError(ValueError):
    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
