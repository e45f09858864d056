"""Estimator-style wrappers around the product and automorphism searches.

These follow the scikit-learn conventions (constructor stores parameters,
``fit`` learns from a patch and returns self, learned attributes end in an
underscore) so they compose with ``get_params``/``set_params`` and
``sklearn.base.clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .automorphism import DEFAULT_BUDGET, apply_code, enumerate_codes, modulo_shifts
from .errors import ContractError
from .grid import Alphabet, Pattern, Rect, ShiftVector
from .product import ConflictWitness, ProductDecomposition, detect_product


def check_pattern(X, alphabet: Alphabet | None = None) -> Pattern:
    """Accept a Pattern or a 2D integer array (rows bottom-up, origin at 0)."""
    if isinstance(X, Pattern):
        return X
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.size == 0:
        raise ContractError(f"expected a non-empty 2D array or Pattern, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ContractError(f"expected integer symbols, got dtype {arr.dtype}")
    return Pattern.from_rows(arr, alphabet)


def _anchor(anchor) -> ShiftVector:
    if anchor is None or isinstance(anchor, ShiftVector):
        return anchor
    x, y = anchor
    return ShiftVector(int(x), int(y))


class ProductDecomposer(TransformerMixin, BaseEstimator):
    """Learn a product structure x_{i,j} = phi(row block i, column block j).

    ``transform`` maps a patch to its pair of axis words and
    ``inverse_transform`` rebuilds a patch from such a pair.
    """

    def __init__(self, radius: int = 0, anchor=None):
        self.radius = radius
        self.anchor = anchor

    def fit(self, X, y=None):
        patch = check_pattern(X)
        anchor = _anchor(self.anchor)
        if anchor is None:
            s = patch.support
            anchor = ShiftVector(s.x0 + s.width // 2, s.y0 + s.height // 2)
        result = detect_product(patch, self.radius, anchor)
        self.conflict_ = result if isinstance(result, ConflictWitness) else None
        self.decomposition_ = result if isinstance(result, ProductDecomposition) else None
        self.is_product_ = self.decomposition_ is not None
        self.anchor_ = anchor
        return self

    def _fitted(self) -> ProductDecomposition:
        if not hasattr(self, "is_product_"):
            raise NotFittedError("ProductDecomposer is not fitted yet")
        if not self.is_product_:
            raise ContractError("the fitted patch has no product structure at this radius")
        return self.decomposition_

    def transform(self, X):
        """Axis words of X, in the fitted block alphabets."""
        d = self._fitted()
        other = detect_product(check_pattern(X), self.radius, self.anchor_)
        if not isinstance(other, ProductDecomposition):
            raise ContractError("X is not product-consistent at the fitted radius")
        row_ix = {p: k for k, p in enumerate(d.row_alphabet)}
        col_ix = {p: k for k, p in enumerate(d.col_alphabet)}
        try:
            rows = tuple(row_ix[other.row_alphabet[a]] for a in other.row_word)
            cols = tuple(col_ix[other.col_alphabet[b]] for b in other.col_word)
        except KeyError as exc:
            raise ContractError("X uses axis blocks unseen during fit") from exc
        return rows, cols

    def inverse_transform(self, words) -> Pattern:
        d = self._fitted()
        rows, cols = words
        try:
            cells = [[d.phi[(a, b)] for a in rows] for b in cols]
        except KeyError as exc:
            raise ContractError(f"phi is undefined on the pair {exc.args[0]}") from exc
        return Pattern(Rect(0, 0, len(rows), len(cols)), cells, d.alphabet)

    def predict(self, X=None) -> Pattern:
        """The fitted region rebuilt from phi and the fitted axis words."""
        return self._fitted().rebuild()


class AutomorphismSearch(TransformerMixin, BaseEstimator):
    """Find candidate automorphisms of the language sampled from a patch."""

    def __init__(self, radius: int = 0, check_size: int = 2, budget: int = DEFAULT_BUDGET):
        self.radius = radius
        self.check_size = check_size
        self.budget = budget

    def fit(self, X, y=None):
        patch = check_pattern(X)
        self.codes_ = enumerate_codes(patch, self.radius, self.check_size, self.budget)
        self.representatives_ = modulo_shifts(self.codes_)
        return self

    def transform(self, X, index: int = 0) -> Pattern:
        if not hasattr(self, "codes_"):
            raise NotFittedError("AutomorphismSearch is not fitted yet")
        return apply_code(self.codes_[index], check_pattern(X))
