"""Finite-window cube structures for two-dimensional symbolic systems."""

__version__ = "0.1.0"

from .errors import AlphabetMismatch, ContractError, DyncubeError, RangeError, ResourceError
from .grid import Alphabet, Pattern, Rect, ShiftVector, Verdict, occurrences, subpattern, translate

__all__ = [
    "Alphabet", "AlphabetMismatch", "ContractError", "DyncubeError", "Pattern", "RangeError",
    "Rect", "ResourceError", "ShiftVector", "Verdict", "occurrences", "subpattern", "translate",
]
