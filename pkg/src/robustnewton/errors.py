"""Exception types shared across the package."""


class AtRootError(ValueError):
    """Raised when a descent step is requested at a point that is already a
    root to within the zero-classification tolerance."""


class CriticalPointError(ValueError):
    """Raised by classic Newton operations when the derivative vanishes to
    within tolerance at the evaluation point."""


class ModulusReductionError(RuntimeError):
    """A step failed the guaranteed-decrement check.

    The iteration carries a runtime oracle: every plain step must decrease
    the squared modulus by at least the a-priori bound (plus a small
    floating-point slack).  A violation indicates a bug or non-finite
    arithmetic, never normal operation.
    """


class NonFiniteError(ValueError):
    """Polynomial values overflowed or produced NaN during iteration."""


class ConvergenceFailure(RuntimeError):
    """An all-roots solve exhausted its iteration budget.

    Attributes:
        partial: the RootSet accumulated before the failure.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
