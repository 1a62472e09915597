"""Exception hierarchy shared by the library and the command line front end."""


class MomentError(ValueError):
    """Base class for every numerical failure raised by the package."""


class NonpositiveDensityError(MomentError):
    pass


class UnrealizableMomentError(MomentError):
    """Moments with m0*m2 - m1**2 below the round-off tolerance."""


class FrontierError(MomentError):
    """Operation undefined on the frontier e = 0 of the moment space."""


class RealizabilityViolation(MomentError):
    """A solver step produced a cell outside the moment space."""


class NoConvergenceError(MomentError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonEntropicRootError(MomentError):
    pass


class UnknownCaseError(MomentError):
    pass


class ValidityError(MomentError):
    """Oracle evaluated outside its time range, or at the wrong time."""
