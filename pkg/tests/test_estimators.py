import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dyncube.errors import ContractError
from dyncube.estimators import AutomorphismSearch, ProductDecomposer, check_pattern
from dyncube.grid import Pattern
from dyncube.product import ConflictWitness
from dyncube.robinson import supertile
from dyncube.substitution import central_patch, iterate, morse_rule


def test_check_pattern():
    p = check_pattern([[0, 1], [1, 0]])
    assert isinstance(p, Pattern) and p.at(1, 0) == 1
    assert check_pattern(p) is p
    with pytest.raises(ContractError):
        check_pattern([1, 2, 3])
    with pytest.raises(ContractError):
        check_pattern([[0.5]])


def test_decomposer_on_morse_array():
    cells = iterate(morse_rule(), 0, 5).cells
    est = ProductDecomposer(radius=0).fit(cells)
    assert est.is_product_ and est.conflict_ is None
    assert np.array_equal(est.predict().cells, cells)
    rows, cols = est.transform(cells)
    assert len(rows) == 32 and len(cols) == 32
    rebuilt = est.inverse_transform((rows, cols))
    assert np.array_equal(rebuilt.cells, cells)


def test_decomposer_on_robinson():
    est = ProductDecomposer(radius=1).fit(supertile(5))
    assert not est.is_product_
    assert isinstance(est.conflict_, ConflictWitness)
    with pytest.raises(ContractError):
        est.predict()


def test_decomposer_params_and_clone():
    est = ProductDecomposer(radius=1, anchor=(0, 0))
    assert est.get_params() == {"radius": 1, "anchor": (0, 0)}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and not hasattr(twin, "is_product_")
    with pytest.raises(NotFittedError):
        twin.transform([[0]])


def test_decomposer_explicit_anchor():
    p = central_patch(morse_rule(), 4)
    est = ProductDecomposer(anchor=(0, 0)).fit(p)
    assert est.anchor_.n == 0 and est.is_product_


def test_automorphism_search():
    p = central_patch(morse_rule(), 6)
    est = AutomorphismSearch(radius=0, check_size=2).fit(p)
    assert len(est.codes_) == 2
    flipped = est.transform(p, index=1)
    assert np.array_equal(flipped.cells, 1 - p.cells)
    with pytest.raises(NotFittedError):
        AutomorphismSearch().transform(p)
