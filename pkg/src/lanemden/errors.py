"""Exception hierarchy; every numerical failure derives from LaneEmdenError."""


class LaneEmdenError(Exception):
    pass


class StepFailure(LaneEmdenError):
    """Adaptive step size underflowed, or continuation exhausted its halvings."""


class NotBracketed(LaneEmdenError):
    """The shot did not produce the requested number of zeros before the horizon."""


class ProfileFailure(LaneEmdenError):
    """The radial profile cannot be represented (overflow, failed solve)."""


class NoNegativeEigenvalue(LaneEmdenError):
    pass


class InvalidOrdering(LaneEmdenError, ValueError):
    pass


class LostBracket(LaneEmdenError):
    pass


class CollapsedToRadial(LaneEmdenError):
    pass


class UnresolvedNodalSet(LaneEmdenError):
    pass
