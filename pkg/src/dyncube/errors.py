"""Exception types shared by all modules."""


class DyncubeError(Exception):
    """Base class for library errors."""


class RangeError(DyncubeError, IndexError):
    """A rectangle, coordinate or index falls outside the allowed range."""


class AlphabetMismatch(DyncubeError, TypeError):
    """Two patterns over different alphabets were combined."""


class ResourceError(DyncubeError, RuntimeError):
    """A size ceiling or search budget was exceeded."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ContractError(DyncubeError, ValueError):
    """A documented precondition does not hold."""
