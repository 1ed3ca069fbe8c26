"""Exception types shared across arborlab modules."""


class ArborlabError(Exception):
    """Base class for all arborlab errors."""


class EmptyCodeError(ArborlabError):
    """A tree code with no entries was supplied."""


class MalformedCodeError(ArborlabError):
    """The child-count sequence violates the prefix-sum rule."""


class CapExceededError(ArborlabError):
    """A requested size exceeds the configured safety cap."""


class ArityMismatchError(ArborlabError):
    """Number of branches does not match the number of graft vertices."""


class ModeMismatchError(ArborlabError):
    """Operation requested in a mode that cannot represent the result."""


class OutOfRangeError(ArborlabError):
    """Query outside the range covered by a table."""


class LogCaseError(ArborlabError):
    """The exponent sits on a logarithmic boundary; use the closed form."""


class UnsupportedError(ArborlabError):
    """Parameter outside the supported domain."""


class AtPoleError(ArborlabError):
    """Evaluation point coincides with a pole."""


class AtBranchPointError(ArborlabError):
    """Evaluation point coincides with a branch point."""


class DivergentError(ArborlabError):
    """The requested series does not converge for these parameters."""


class ExtrapolationUnstableError(ArborlabError):
    """Richardson extrapolation failed to settle."""


class EmptyClassError(ArborlabError):
    """No tree satisfies the requested (size, height) constraints."""


class TruncatedError(ArborlabError):
    """A random generation run exceeded its size cap.

    partial_size holds the number of edges generated before the cap hit.
    """

    def __init__(self, message: str, partial_size: int):
        super().__init__(message)
        self.partial_size = partial_size


class TooSmallError(ArborlabError):
    """Target size is too small to contain the requested base tree."""
